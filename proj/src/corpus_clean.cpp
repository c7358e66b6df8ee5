#include "cptk/corpus/clean.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "cptk/error.hpp"
#include "json.hpp"

namespace cptk::corpus {

namespace {

// Markup profile for web-scraped / wiki-style text. Paragraph-like tags
// become newlines so document structure survives tag stripping; everything
// else that looks like markup noise is removed or flattened to spaces.
// Rules run in order; "repeat" rules run until the text stops changing,
// which unwraps nested constructs one layer per pass.
constexpr const char* kWebProfileJson = R"PROFILE({
  "name": "web",
  "version": 1,
  "newline_tags": ["br", "p", "div", "li", "ul", "ol", "tr", "td", "th",
                   "table", "h1", "h2", "h3", "h4", "h5", "h6",
                   "blockquote", "pre", "hr"],
  "rules": [
    {"comment": "html comments",
     "pattern": "<!--[\\s\\S]*?-->", "replacement": " "},
    {"comment": "nested double-brace templates, innermost first",
     "pattern": "\\{\\{[^{}]*\\}\\}", "replacement": " ", "repeat": true},
    {"comment": "media/file links including their captions",
     "pattern": "\\[\\[(?:File|Image|Media):[^\\[\\]]*\\]\\]",
     "replacement": " ", "icase": true},
    {"comment": "labeled wiki links keep the label",
     "pattern": "\\[\\[[^\\[\\]|]*\\|([^\\[\\]]*)\\]\\]",
     "replacement": "$1", "repeat": true},
    {"comment": "bare wiki links keep the target text",
     "pattern": "\\[\\[([^\\[\\]]*)\\]\\]", "replacement": "$1",
     "repeat": true},
    {"comment": "numeric reference markers",
     "pattern": "\\[[0-9]+\\]", "replacement": ""},
    {"comment": "paragraph-like tags become line breaks",
     "newline_tags": true, "replacement": "\n"},
    {"comment": "remaining tags vanish without inserting whitespace",
     "pattern": "</?[A-Za-z!?][^<>]*>", "replacement": "", "repeat": true},
    {"comment": "character entity references flatten to a space",
     "pattern": "&(?:[A-Za-z]{2,10}|#[0-9]{1,7}|#[Xx][0-9A-Fa-f]{1,6});",
     "replacement": " "},
    {"comment": "horizontal whitespace runs collapse to one space",
     "pattern": "[^\\S\\n]+", "replacement": " "},
    {"comment": "spaces hugging a line break disappear",
     "pattern": " ?\\n ?", "replacement": "\n"},
    {"comment": "blank-line runs collapse to a single break",
     "pattern": "\\n{2,}", "replacement": "\n"},
    {"comment": "trim leading whitespace",
     "pattern": "^\\s+", "replacement": ""},
    {"comment": "trim trailing whitespace",
     "pattern": "\\s+$", "replacement": ""}
  ]
})PROFILE";

constexpr const char* kPassthroughProfileJson = R"PROFILE({
  "name": "passthrough",
  "version": 1,
  "newline_tags": [],
  "rules": []
})PROFILE";

// Nesting never runs away in practice; the cap guards against adversarial
// rule sets that oscillate instead of converging.
constexpr int kMaxFixpointPasses = 64;

std::string join_alternatives(const std::vector<std::string>& tags) {
    std::string out;
    for (const auto& tag : tags) {
        if (!out.empty()) out += '|';
        out += tag;
    }
    return out;
}

}  // namespace

const CleaningProfile& CleaningProfile::builtin(const std::string& name) {
    static const std::map<std::string, CleaningProfile> profiles = [] {
        std::map<std::string, CleaningProfile> m;
        m.emplace("web", CleaningProfile::from_json(kWebProfileJson));
        m.emplace("passthrough", CleaningProfile::from_json(kPassthroughProfileJson));
        return m;
    }();
    auto it = profiles.find(name);
    if (it == profiles.end()) {
        std::string known;
        for (const auto& [k, v] : profiles) {
            if (!known.empty()) known += ", ";
            known += k;
        }
        throw ConfigError("unknown cleaning profile '" + name + "' (built in: " + known + ")");
    }
    return it->second;
}

CleaningProfile CleaningProfile::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open cleaning profile: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return from_json(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

CleaningProfile CleaningProfile::from_json(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("cleaning profile is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("cleaning profile must be a JSON object");

    CleaningProfile profile;
    profile.definition_ = doc.dump(2);
    profile.name_ = doc.value("name", std::string());
    if (profile.name_.empty()) throw ConfigError("cleaning profile needs a non-empty \"name\"");
    profile.version_ = doc.value("version", 0);
    if (profile.version_ < 1) throw ConfigError("cleaning profile needs an integer \"version\" >= 1");

    if (doc.contains("newline_tags")) {
        for (const auto& tag : doc.at("newline_tags")) {
            if (!tag.is_string() || tag.get<std::string>().empty()) {
                throw ConfigError("cleaning profile \"newline_tags\" must be non-empty strings");
            }
            profile.newline_tags_.push_back(tag.get<std::string>());
        }
    }

    std::vector<CleaningRule> rules;
    if (doc.contains("rules")) {
        size_t index = 0;
        for (const auto& entry : doc.at("rules")) {
            if (!entry.is_object()) throw ConfigError("cleaning rule must be a JSON object");
            CleaningRule rule;
            if (entry.value("newline_tags", false)) {
                if (profile.newline_tags_.empty()) {
                    throw ConfigError("rule " + std::to_string(index) +
                                      " uses newline_tags but the profile lists none");
                }
                rule.pattern = "<\\s*/?\\s*(?:" + join_alternatives(profile.newline_tags_) +
                               ")\\b[^<>]*>";
                rule.icase = true;
            } else {
                rule.pattern = entry.value("pattern", std::string());
                if (rule.pattern.empty()) {
                    throw ConfigError("rule " + std::to_string(index) +
                                      " needs a non-empty \"pattern\"");
                }
                rule.icase = entry.value("icase", false);
            }
            rule.replacement = entry.value("replacement", std::string());
            rule.repeat = entry.value("repeat", false);
            rules.push_back(std::move(rule));
            ++index;
        }
    }
    profile.compile(rules);
    return profile;
}

void CleaningProfile::compile(const std::vector<CleaningRule>& rules) {
    size_t index = 0;
    for (const auto& rule : rules) {
        auto flags = std::regex::ECMAScript | std::regex::optimize;
        if (rule.icase) flags |= std::regex::icase;
        try {
            compiled_.push_back(CompiledRule{std::regex(rule.pattern, flags),
                                             rule.replacement, rule.repeat});
        } catch (const std::regex_error& e) {
            throw ConfigError("cleaning profile '" + name_ + "' rule " + std::to_string(index) +
                              ": bad pattern '" + rule.pattern + "': " + e.what());
        }
        ++index;
    }
}

std::string CleaningProfile::apply(const std::string& text) const {
    std::string current = text;
    for (const auto& rule : compiled_) {
        int passes = 0;
        while (true) {
            std::string next = std::regex_replace(current, rule.re, rule.replacement);
            bool changed = next != current;
            current = std::move(next);
            if (!rule.repeat || !changed || ++passes >= kMaxFixpointPasses) break;
        }
    }
    return current;
}

std::string clean_markup(const std::string& text, const CleaningProfile& profile) {
    return profile.apply(text);
}

}  // namespace cptk::corpus
