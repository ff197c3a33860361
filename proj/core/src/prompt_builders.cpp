#include "emomem/prompt_builders.hpp"

namespace emomem {

std::string format_memories(const std::vector<MemoryFragment>& memories,
                            const TemplateRegistry& templates) {
    if (memories.empty()) {
        return render(templates.get(kNoMemoryNoticeTemplate), {});
    }
    std::string block;
    for (std::size_t i = 0; i < memories.size(); ++i) {
        if (i > 0) block += '\n';
        block += std::to_string(i + 1);
        block += ". ";
        block += memories[i].text;
    }
    return block;
}

ChatRequest build_generation_prompt(const CharacterProfile& profile,
                                    const std::vector<MemoryFragment>& memories,
                                    const std::string& query,
                                    const TemplateRegistry& templates) {
    const std::string rendered = render(templates.get(kGenerationTemplate),
                                        {{"character_name", profile.name},
                                         {"profile", profile.profile_text},
                                         {"memories", format_memories(memories, templates)},
                                         {"query", query}});
    ChatRequest request;
    request.messages.push_back({Role::User, rendered});
    return request;
}

}  // namespace emomem
