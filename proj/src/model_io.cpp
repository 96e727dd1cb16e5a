#include "bwb/model_io.hpp"

#include <fstream>

namespace bwb {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ModelParseError("model file, field '" + where + "': " + what);
}

double require_prob(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    double p = j.get<double>();
    if (!(p >= 0.0) || p > 1.0 + 1e-9) fail(where, "probability out of range");
    return p;
}

std::uint64_t require_uint(const json& j, const std::string& where) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
        fail(where, "expected a nonnegative integer");
    return j.get<std::uint64_t>();
}

}  // namespace

ModelSpec model_from_json(const json& doc) {
    if (!doc.is_object()) throw ModelParseError("model file: top level must be an object");
    ModelSpec spec;
    spec.name = doc.value("name", std::string("unnamed"));

    if (!doc.contains("cell_law") || !doc["cell_law"].is_array())
        fail("cell_law", "expected an array of {k, p}");
    std::vector<std::pair<std::uint64_t, double>> entries;
    for (std::size_t i = 0; i < doc["cell_law"].size(); ++i) {
        const auto& e = doc["cell_law"][i];
        std::string where = "cell_law[" + std::to_string(i) + "]";
        if (!e.is_object() || !e.contains("k") || !e.contains("p")) fail(where, "expected {k, p}");
        entries.emplace_back(require_uint(e["k"], where + ".k"), require_prob(e["p"], where + ".p"));
    }
    try {
        spec.cell_law = CellOffspringLaw(std::move(entries));
    } catch (const std::exception& e) {
        fail("cell_law", e.what());
    }

    if (!doc.contains("kernels") || !doc["kernels"].is_object())
        fail("kernels", "expected an object keyed by k");
    for (const auto& [key, kj] : doc["kernels"].items()) {
        std::uint64_t k = 0;
        try {
            k = std::stoull(key);
        } catch (...) {
            fail("kernels." + key, "key must be an integer k");
        }
        std::string where = "kernels." + key;
        if (!kj.is_object() || !kj.contains("type")) fail(where, "expected {type, entries}");
        std::string type = kj["type"].get<std::string>();
        if (!kj.contains("entries")) fail(where + ".entries", "missing");
        const auto& ent = kj["entries"];
        try {
            if (type == "table") {
                std::vector<std::pair<std::vector<std::uint64_t>, double>> atoms;
                for (std::size_t i = 0; i < ent.size(); ++i) {
                    const auto& a = ent[i];
                    std::string aw = where + ".entries[" + std::to_string(i) + "]";
                    if (!a.is_object() || !a.contains("x") || !a.contains("p"))
                        fail(aw, "expected {x, p}");
                    std::vector<std::uint64_t> x;
                    for (const auto& c : a["x"]) x.push_back(require_uint(c, aw + ".x"));
                    atoms.emplace_back(std::move(x), require_prob(a["p"], aw + ".p"));
                }
                spec.kernels[k] = SharingKernel::table(k, VectorLaw(k, std::move(atoms)));
            } else if (type == "product") {
                std::vector<DiscreteLaw> comps;
                for (std::size_t j = 0; j < ent.size(); ++j) {
                    std::string cw = where + ".entries[" + std::to_string(j) + "]";
                    std::vector<std::pair<std::uint64_t, double>> cv;
                    for (const auto& a : ent[j]) {
                        if (!a.is_object() || !a.contains("v") || !a.contains("p"))
                            fail(cw, "expected {v, p}");
                        cv.emplace_back(require_uint(a["v"], cw + ".v"),
                                        require_prob(a["p"], cw + ".p"));
                    }
                    comps.emplace_back(std::move(cv));
                }
                spec.kernels[k] = SharingKernel::product(k, std::move(comps));
            } else {
                fail(where + ".type", "must be \"table\" or \"product\"");
            }
        } catch (const ModelParseError&) {
            throw;
        } catch (const std::exception& e) {
            fail(where, e.what());
        }
    }

    try {
        spec.validate();
    } catch (const std::exception& e) {
        throw ModelParseError(std::string("model file: ") + e.what());
    }
    return spec;
}

json model_to_json(const ModelSpec& spec) {
    json doc;
    doc["name"] = spec.name;
    doc["cell_law"] = json::array();
    for (const auto& [k, p] : spec.cell_law.law().atoms())
        doc["cell_law"].push_back({{"k", k}, {"p", p}});
    doc["kernels"] = json::object();
    for (const auto& [k, kern] : spec.kernels) {
        json kj;
        if (kern.is_table()) {
            kj["type"] = "table";
            kj["entries"] = json::array();
            VectorLaw table = kern.as_table();
            for (const auto& [x, p] : table.atoms())
                kj["entries"].push_back({{"x", x}, {"p", p}});
        } else {
            kj["type"] = "product";
            kj["entries"] = json::array();
            for (std::uint64_t j = 0; j < kern.k(); ++j) {
                json comp = json::array();
                DiscreteLaw marg = kern.component_marginal(j);
                for (const auto& [v, p] : marg.atoms()) comp.push_back({{"v", v}, {"p", p}});
                kj["entries"].push_back(comp);
            }
        }
        doc["kernels"][std::to_string(k)] = kj;
    }
    return doc;
}

ModelSpec load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelParseError("cannot open model file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ModelParseError("model file " + path + ": " + e.what());
    }
    return model_from_json(doc);
}

void save_model_file(const ModelSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ModelParseError("cannot write model file: " + path);
    out << model_to_json(spec).dump(2) << "\n";
}

}  // namespace bwb
