#pragma once

#include <memory>
#include <regex>
#include <string>
#include <vector>

namespace cptk::corpus {

// One pattern -> replacement action. `repeat` reapplies the rule until the
// text stops changing (needed for nested constructs like wiki templates).
struct CleaningRule {
    std::string pattern;
    std::string replacement;
    bool repeat = false;
    bool icase = false;
};

// An ordered, versioned markup-cleaning rule set. Profiles are defined as
// JSON data so the shipped rule inventory can be audited and overridden;
// `cptk filter --dump-profile <name>` prints the active definition.
class CleaningProfile {
public:
    // Shipped profiles: "web" (tag/template/annotation stripping with
    // paragraph tags converted to newlines) and "passthrough" (identity).
    static const CleaningProfile& builtin(const std::string& name);

    static CleaningProfile from_json(const std::string& json_text);
    static CleaningProfile from_file(const std::string& path);

    const std::string& name() const { return name_; }
    int version() const { return version_; }
    const std::string& definition_json() const { return definition_; }
    const std::vector<std::string>& newline_tags() const { return newline_tags_; }

    // Applies the newline-tag conversion and then every rule in order.
    // Never fails: pathological inputs pass through with rules applied.
    std::string apply(const std::string& text) const;

private:
    struct CompiledRule {
        std::regex re;
        std::string replacement;
        bool repeat;
    };

    std::string name_;
    int version_ = 0;
    std::string definition_;
    std::vector<std::string> newline_tags_;
    std::vector<CompiledRule> compiled_;

    void compile(const std::vector<CleaningRule>& rules);
};

std::string clean_markup(const std::string& text, const CleaningProfile& profile);

}  // namespace cptk::corpus
