#include "emomem/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "emomem/errors.hpp"

namespace emomem {

namespace {

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Returns the placeholder name starting at body[pos] (which is '{'), or an
// empty string when the braces do not enclose a plain identifier.
std::string placeholder_at(const std::string& body, std::size_t pos, std::size_t* end) {
    std::size_t i = pos + 1;
    if (i >= body.size() || !is_ident_start(body[i])) return {};
    std::size_t start = i;
    while (i < body.size() && is_ident_char(body[i])) ++i;
    if (i >= body.size() || body[i] != '}') return {};
    *end = i;
    return body.substr(start, i - start);
}

}  // namespace

PromptTemplate PromptTemplate::from_string(std::string name, std::string body) {
    PromptTemplate tmpl;
    tmpl.name = std::move(name);
    tmpl.body = std::move(body);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < tmpl.body.size(); ++i) {
        if (tmpl.body[i] != '{') continue;
        std::size_t end = 0;
        std::string ph = placeholder_at(tmpl.body, i, &end);
        if (!ph.empty()) {
            if (seen.insert(ph).second) {
                tmpl.required_placeholders.push_back(std::move(ph));
            }
            i = end;
        }
    }
    return tmpl;
}

PromptTemplate PromptTemplate::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open template file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(path.stem().string(), buf.str());
}

std::string render(const PromptTemplate& tmpl, const std::map<std::string, std::string>& vars) {
    std::vector<std::string> missing;
    for (const auto& name : tmpl.required_placeholders) {
        if (!vars.count(name)) missing.push_back(name);
    }
    if (!missing.empty()) {
        throw MissingVariableError(std::move(missing));
    }
    std::string out;
    out.reserve(tmpl.body.size());
    for (std::size_t i = 0; i < tmpl.body.size(); ++i) {
        if (tmpl.body[i] == '{') {
            std::size_t end = 0;
            std::string ph = placeholder_at(tmpl.body, i, &end);
            if (!ph.empty()) {
                out += vars.at(ph);
                i = end;
                continue;
            }
        }
        out += tmpl.body[i];
    }
    return out;
}

TemplateRegistry TemplateRegistry::load_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw ConfigError("template directory not found: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    TemplateRegistry registry;
    for (const auto& file : files) {
        registry.add(PromptTemplate::from_file(file));
    }
    return registry;
}

void TemplateRegistry::add(PromptTemplate tmpl) {
    std::string key = tmpl.name;
    templates_[key] = std::move(tmpl);
}

bool TemplateRegistry::contains(const std::string& key) const {
    return templates_.count(key) > 0;
}

const PromptTemplate& TemplateRegistry::get(const std::string& key) const {
    auto it = templates_.find(key);
    if (it == templates_.end()) {
        throw ConfigError("unknown prompt template '" + key + "'");
    }
    return it->second;
}

std::vector<std::string> TemplateRegistry::keys() const {
    std::vector<std::string> out;
    out.reserve(templates_.size());
    for (const auto& [key, _] : templates_) out.push_back(key);
    return out;
}

}  // namespace emomem
