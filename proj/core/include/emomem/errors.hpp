#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace emomem {

// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A backend reply (emotion scores, judge verdicts, ...) could not be
// interpreted, after the re-prompt budget was exhausted where applicable.
class ParseError : public Error {
public:
    using Error::Error;
};

// Transport or HTTP failure talking to a chat/embedding backend, raised
// after the retry budget is spent.
class BackendError : public Error {
public:
    using Error::Error;
};

class TimeoutError : public BackendError {
public:
    using BackendError::BackendError;
};

// Credential rejection; never retried.
class AuthError : public BackendError {
public:
    using BackendError::BackendError;
};

// A vector did not have the length the caller or backend declared.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Malformed record in a data file; message carries the line/row number.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    explicit FormatError(const std::string& what) : Error(what), line_(0) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class DuplicateIdError : public FormatError {
public:
    DuplicateIdError(const std::string& id, std::size_t line)
        : FormatError("duplicate fragment id '" + id + "'", line), id_(id) {}
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

// Retrieval was asked to run over fragments whose vectors were never
// precomputed; lists the offending ids.
class UncachedVectorError : public Error {
public:
    explicit UncachedVectorError(std::vector<std::string> ids)
        : Error(make_message(ids)), ids_(std::move(ids)) {}
    const std::vector<std::string>& ids() const { return ids_; }

private:
    static std::string make_message(const std::vector<std::string>& ids) {
        std::string msg = "fragments missing cached vectors:";
        for (const auto& id : ids) {
            msg += ' ';
            msg += id;
        }
        return msg;
    }
    std::vector<std::string> ids_;
};

// Template rendering was missing one or more required placeholders.
class MissingVariableError : public Error {
public:
    explicit MissingVariableError(std::vector<std::string> names)
        : Error(make_message(names)), names_(std::move(names)) {}
    const std::vector<std::string>& names() const { return names_; }

private:
    static std::string make_message(const std::vector<std::string>& names) {
        std::string msg = "missing template variables:";
        for (const auto& name : names) {
            msg += ' ';
            msg += name;
        }
        return msg;
    }
    std::vector<std::string> names_;
};

// Metrics were requested for characters without ground-truth labels.
class MissingLabelError : public Error {
public:
    explicit MissingLabelError(std::vector<std::string> character_ids)
        : Error(make_message(character_ids)), character_ids_(std::move(character_ids)) {}
    const std::vector<std::string>& character_ids() const { return character_ids_; }

private:
    static std::string make_message(const std::vector<std::string>& ids) {
        std::string msg = "characters missing labels:";
        for (const auto& id : ids) {
            msg += ' ';
            msg += id;
        }
        return msg;
    }
    std::vector<std::string> character_ids_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class UnknownCharacterError : public Error {
public:
    explicit UnknownCharacterError(const std::string& character_id)
        : Error("unknown character '" + character_id + "'"), character_id_(character_id) {}
    const std::string& character_id() const { return character_id_; }

private:
    std::string character_id_;
};

}  // namespace emomem
