#include "cptk/document.hpp"

#include <fstream>

#include <json.hpp>

#include "cptk/error.hpp"

namespace cptk {

using nlohmann::json;

Document parse_document(const std::string& line, const std::string& where) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw DataError(where + ": not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw DataError(where + ": document line is not a JSON object");
    Document doc;
    if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty()) {
        throw DataError(where + ": document is missing a non-empty string \"id\"");
    }
    doc.id = j["id"].get<std::string>();
    if (!j.contains("text") || !j["text"].is_string()) {
        throw DataError(where + ": document \"" + doc.id + "\" is missing string \"text\"");
    }
    doc.text = j["text"].get<std::string>();
    if (j.contains("source")) {
        if (!j["source"].is_string()) {
            throw DataError(where + ": document \"" + doc.id + "\": \"source\" must be a string");
        }
        doc.source = j["source"].get<std::string>();
    }
    if (j.contains("meta") && !j["meta"].is_null()) {
        if (!j["meta"].is_object()) {
            throw DataError(where + ": document \"" + doc.id + "\": \"meta\" must be an object");
        }
        for (const auto& [k, v] : j["meta"].items()) {
            if (!v.is_string()) {
                throw DataError(where + ": document \"" + doc.id +
                                "\": meta values must be strings");
            }
            doc.meta[k] = v.get<std::string>();
        }
    }
    return doc;
}

std::string document_to_json(const Document& doc) {
    json j;
    j["id"] = doc.id;
    j["source"] = doc.source;
    j["text"] = doc.text;
    if (!doc.meta.empty()) j["meta"] = doc.meta;
    return j.dump();
}

DocumentReader::DocumentReader(const std::string& path) : path_(path) {
    in_ = new std::ifstream(path);
    if (!*in_) {
        delete in_;
        in_ = nullptr;
        throw DataError("cannot open input file: " + path);
    }
}

DocumentReader::~DocumentReader() { delete in_; }

bool DocumentReader::next(Document& doc) {
    while (std::getline(*in_, raw_)) {
        ++line_no_;
        if (raw_.empty()) continue;
        doc = parse_document(raw_, path_ + ":" + std::to_string(line_no_));
        return true;
    }
    return false;
}

void for_each_document(const std::string& path,
                       const std::function<void(const Document&)>& fn) {
    DocumentReader reader(path);
    Document doc;
    while (reader.next(doc)) fn(doc);
}

}  // namespace cptk
