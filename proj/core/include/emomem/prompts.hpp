#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace emomem {

// A prompt body with {placeholder} slots. Placeholder names are C-style
// identifiers; anything else between braces is literal text.
struct PromptTemplate {
    std::string name;
    std::string body;
    std::vector<std::string> required_placeholders;

    static PromptTemplate from_string(std::string name, std::string body);
    static PromptTemplate from_file(const std::filesystem::path& path);
};

// Exact single-pass substitution; values are inserted verbatim and never
// re-expanded. Throws MissingVariableError listing every absent name.
std::string render(const PromptTemplate& tmpl, const std::map<std::string, std::string>& vars);

// Loads every *.txt in a directory; the file stem is the registry key.
class TemplateRegistry {
public:
    static TemplateRegistry load_dir(const std::filesystem::path& dir);

    void add(PromptTemplate tmpl);
    bool contains(const std::string& key) const;
    const PromptTemplate& get(const std::string& key) const;
    std::vector<std::string> keys() const;

private:
    std::map<std::string, PromptTemplate> templates_;
};

}  // namespace emomem
