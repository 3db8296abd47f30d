#include "satbridge/dataset.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "satbridge/error.hpp"

namespace satbridge {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void save_labeled(const std::string& dir, const std::vector<LabeledInstance>& instances) {
    fs::create_directories(dir);
    std::ofstream index(fs::path(dir) / "labels.jsonl", std::ios::trunc);
    if (!index) throw IoError("cannot write labels.jsonl in " + dir);
    for (size_t i = 0; i < instances.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "%04zu.wcnf", i);
        std::ofstream f(fs::path(dir) / name, std::ios::trunc);
        if (!f) throw IoError(std::string("cannot write ") + name + " in " + dir);
        f << emit_wcnf(instances[i].formula);
        std::string labels;
        for (auto b : instances[i].labels) labels.push_back(b ? '1' : '0');
        json j;
        j["file"] = name;
        j["labels"] = labels;
        j["source"] = instances[i].source;
        j["proven"] = instances[i].proven;
        index << j.dump() << '\n';
    }
}

std::vector<LabeledInstance> load_labeled(const std::string& dir, bool polarity_edges) {
    std::ifstream index(fs::path(dir) / "labels.jsonl");
    if (!index) throw IoError("cannot open labels.jsonl in " + dir);
    std::vector<LabeledInstance> out;
    std::string line;
    while (std::getline(index, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        LabeledInstance inst;
        std::ifstream f(fs::path(dir) / j.at("file").get<std::string>());
        if (!f) throw IoError("missing dataset file " + j.at("file").get<std::string>());
        inst.formula = parse_wcnf(f);
        std::string labels = j.at("labels").get<std::string>();
        if (static_cast<int>(labels.size()) != inst.formula.n_vars)
            throw ParseError("labels length mismatch in " + j.at("file").get<std::string>());
        for (char c : labels) {
            if (c != '0' && c != '1') throw ParseError("labels must be 0/1");
            inst.labels.push_back(c == '1');
        }
        inst.source = j.value("source", std::string());
        inst.proven = j.value("proven", false);
        inst.bipartite = build_bipartite(inst.formula, polarity_edges);
        out.push_back(std::move(inst));
    }
    return out;
}

}  // namespace satbridge
