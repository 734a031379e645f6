#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sunpatch/clustering.hpp"
#include "sunpatch/dictionary.hpp"
#include "sunpatch/metrics.hpp"

namespace sunpatch {

namespace {

nlohmann::json read_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path + " for reading");
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << j.dump(2) << "\n";
    if (!os) throw IoError("write failed for " + path);
}

} // namespace

void save_dictionary(const std::string& path, const ImageDictionary& dict) {
    nlohmann::json j;
    j["source_id"] = dict.source_id;
    j["atom_count"] = dict.atom_count();
    j["dim"] = dict.dim();
    j["flattened"] = std::vector<double>(dict.flattened.data(),
                                         dict.flattened.data() + dict.flattened.size());
    write_json(path, j);
}

ImageDictionary load_dictionary(const std::string& path) {
    const nlohmann::json j = read_json(path);
    try {
        ImageDictionary dict;
        dict.source_id = j.at("source_id").get<std::string>();
        const int atom_count = j.at("atom_count").get<int>();
        const Eigen::Index dim = j.at("dim").get<Eigen::Index>();
        const std::vector<double> flat = j.at("flattened").get<std::vector<double>>();
        if (atom_count < 1 || dim < 1 ||
            flat.size() != static_cast<std::size_t>(dim) * atom_count) {
            throw IoError("inconsistent dictionary shape in " + path);
        }
        dict.flattened = Eigen::Map<const Eigen::VectorXd>(flat.data(),
                                                           static_cast<Eigen::Index>(flat.size()));
        dict.atoms.resize(dim, atom_count);
        for (int a = 0; a < atom_count; ++a) {
            dict.atoms.col(a) = dict.flattened.segment(static_cast<Eigen::Index>(a) * dim, dim);
        }
        return dict;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad dictionary file " + path + ": " + e.what());
    }
}

void save_similarity(const std::string& path, const SimilarityMatrix& sim) {
    const Eigen::Index n = sim.size();
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        rows[static_cast<std::size_t>(i)].assign(sim.entries.row(i).begin(),
                                                 sim.entries.row(i).end());
    }
    nlohmann::json j;
    j["size"] = n;
    j["entries"] = rows;
    write_json(path, j);
}

SimilarityMatrix load_similarity(const std::string& path) {
    const nlohmann::json j = read_json(path);
    try {
        const Eigen::Index n = j.at("size").get<Eigen::Index>();
        const auto rows = j.at("entries").get<std::vector<std::vector<double>>>();
        if (static_cast<Eigen::Index>(rows.size()) != n) {
            throw IoError("similarity size mismatch in " + path);
        }
        Eigen::MatrixXd entries(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& row = rows[static_cast<std::size_t>(i)];
            if (static_cast<Eigen::Index>(row.size()) != n) {
                throw IoError("similarity row length mismatch in " + path);
            }
            for (Eigen::Index k = 0; k < n; ++k) entries(i, k) = row[static_cast<std::size_t>(k)];
        }
        return SimilarityMatrix::validated(std::move(entries));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad similarity file " + path + ": " + e.what());
    }
}

void save_embedding(const std::string& path, const Embedding& embedding) {
    const Eigen::Index n = embedding.coordinates.rows();
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        rows[static_cast<std::size_t>(i)].assign(embedding.coordinates.row(i).begin(),
                                                 embedding.coordinates.row(i).end());
    }
    nlohmann::json j;
    j["size"] = n;
    j["q"] = embedding.coordinates.cols();
    j["coordinates"] = rows;
    write_json(path, j);
}

void save_labels(const std::string& path,
                 const std::vector<std::pair<std::string, std::int64_t>>& labels) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << "source_id,label\n";
    for (const auto& [id, label] : labels) {
        os << id << "," << label << "\n";
    }
    if (!os) throw IoError("write failed for " + path);
}

std::vector<std::pair<std::string, std::int64_t>> load_labels(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path + " for reading");
    std::vector<std::pair<std::string, std::int64_t>> out;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) throw IoError("malformed label row in " + path);
        const std::string id = line.substr(0, comma);
        const std::string value = line.substr(comma + 1);
        if (first) {
            first = false;
            if (id == "source_id") continue; // header
        }
        try {
            out.emplace_back(id, std::stoll(value));
        } catch (const std::exception&) {
            throw IoError("non-integer label '" + value + "' in " + path);
        }
    }
    return out;
}

} // namespace sunpatch
