#include "test_support.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace testsup {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
    static std::atomic<uint64_t> counter{0};
    const uint64_t n = counter.fetch_add(1);
    path_ = fs::temp_directory_path() /
            ("cptk-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(n));
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string TempDir::file(const std::string& rel) const { return (path_ / rel).string(); }

void write_file(const std::string& path, const std::string& content) {
    fs::create_directories(fs::path(path).parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("test_support: cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("test_support: short write to " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("test_support: cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string doc_line(const std::string& id, const std::string& text, const std::string& source) {
    nlohmann::json doc;
    doc["id"] = id;
    doc["source"] = source;
    doc["text"] = text;
    return doc.dump() + "\n";
}

CommandResult run_command(const std::string& command) {
    CommandResult result;
    const std::string wrapped = command + " 2>&1";
    FILE* pipe = ::popen(wrapped.c_str(), "r");
    if (pipe == nullptr) throw std::runtime_error("test_support: popen failed for " + command);
    char buf[4096];
    size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) {
        result.output.append(buf, got);
    }
    const int status = ::pclose(pipe);
    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else {
        result.exit_code = -1;
    }
    return result;
}

}  // namespace testsup
