#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace cptk {

// One corpus record. The unit of filtering, deduplication and sampling.
struct Document {
    std::string id;
    std::string source;
    std::string text;
    std::map<std::string, std::string> meta;
};

// Parse one JSONL line: {"id","source","text","meta"}. `source` and `meta`
// are optional; unknown fields are ignored. Throws DataError on malformed
// lines, naming `where` (typically "file:line").
Document parse_document(const std::string& line, const std::string& where);

std::string document_to_json(const Document& doc);

// Streams documents out of a JSONL file. Keeps the raw line around so that
// consumers that must preserve input bytes exactly (the mixer) can.
class DocumentReader {
public:
    explicit DocumentReader(const std::string& path);
    ~DocumentReader();
    DocumentReader(const DocumentReader&) = delete;
    DocumentReader& operator=(const DocumentReader&) = delete;

    // False at end of stream. Skips blank lines.
    bool next(Document& doc);
    const std::string& raw_line() const { return raw_; }
    size_t line_number() const { return line_no_; }

private:
    std::string path_;
    std::ifstream* in_;
    std::string raw_;
    size_t line_no_ = 0;
};

// Apply `fn` to every document of a JSONL file, in order.
void for_each_document(const std::string& path,
                       const std::function<void(const Document&)>& fn);

}  // namespace cptk
