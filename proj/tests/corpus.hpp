#pragma once
// Corpus access for the tests: each program lists its queries as "% ?- query." comment lines.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace corpus {

struct Program {
    std::string path;
    std::string text;
    std::vector<std::string> queries;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<Program> load_all(const std::string& dir) {
    std::vector<Program> out;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".lp") out.push_back(Program{e.path().string(), slurp(e.path().string()), {}});
    std::sort(out.begin(), out.end(), [](const Program& a, const Program& b) { return a.path < b.path; });
    for (auto& p : out) {
        std::istringstream in(p.text);
        std::string line;
        while (std::getline(in, line))
            if (line.rfind("% ?- ", 0) == 0) p.queries.push_back(line.substr(5));
    }
    return out;
}

inline std::string path(const std::string& dir, const std::string& name) { return dir + "/" + name; }

}  // namespace corpus
