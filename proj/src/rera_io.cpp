#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "rerl/rera.hpp"

namespace rerl {

using nlohmann::json;

Rera parse_rera(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("rera: invalid JSON: ") + e.what());
    }
    Rera a;
    if (!j.is_object()) throw std::runtime_error("rera: top level must be an object");
    a.alphabet = Alphabet(j.at("alphabet").get<std::vector<std::string>>());
    a.location_names = j.at("locations").get<std::vector<std::string>>();
    auto loc_index = [&](const std::string& name) {
        for (int i = 0; i < a.num_locations(); ++i) {
            if (a.location_names[i] == name) return i;
        }
        throw std::runtime_error("rera: unknown location " + name);
    };
    a.initial = loc_index(j.at("initial").get<std::string>());
    a.accepting.assign(a.num_locations(), false);
    for (const auto& name : j.at("accepting").get<std::vector<std::string>>()) {
        a.accepting[loc_index(name)] = true;
    }
    a.max_constant = j.at("max_constant").get<std::int64_t>();
    for (const auto& jt : j.at("transitions")) {
        Transition t;
        t.source = loc_index(jt.at("source").get<std::string>());
        t.target = loc_index(jt.at("target").get<std::string>());
        auto action = a.alphabet.index_of(jt.at("action").get<std::string>());
        if (!action) {
            throw std::runtime_error("rera: unknown action " +
                                     jt.at("action").get<std::string>());
        }
        t.action = *action;
        t.reset = jt.at("reset").get<bool>();
        std::vector<GuardAtom> atoms;
        for (const auto& ja : jt.at("guard")) {
            GuardAtom atom;
            auto clock = a.alphabet.clock_index(ja.at("clock").get<std::string>());
            if (!clock) {
                throw std::runtime_error("rera: unknown clock " +
                                         ja.at("clock").get<std::string>());
            }
            atom.clock = *clock;
            auto rel = rel_from_string(ja.at("rel").get<std::string>());
            if (!rel) {
                throw std::runtime_error("rera: unknown relation " +
                                         ja.at("rel").get<std::string>());
            }
            atom.rel = *rel;
            atom.constant = ja.at("const").get<std::int64_t>();
            if (atom.constant < 0) {
                throw std::runtime_error("rera: negative guard constant");
            }
            atoms.push_back(atom);
        }
        t.guard = Guard::from_atoms(atoms);
        a.transitions.push_back(std::move(t));
    }
    a.validate();
    return a;
}

Rera load_rera(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("rera: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_rera(buf.str());
}

std::string serialize_rera(const Rera& a) {
    json j;
    j["alphabet"] = a.alphabet.actions();
    j["locations"] = a.location_names;
    j["initial"] = a.location_names.at(a.initial);
    std::vector<std::string> acc;
    for (int l = 0; l < a.num_locations(); ++l) {
        if (a.accepting[l]) acc.push_back(a.location_names[l]);
    }
    j["accepting"] = acc;
    j["max_constant"] = a.max_constant;
    j["transitions"] = json::array();
    for (const auto& t : a.transitions) {
        json jt;
        jt["source"] = a.location_names.at(t.source);
        jt["action"] = a.alphabet.action(t.action);
        jt["guard"] = json::array();
        for (const auto& atom : t.guard.atoms()) {
            json ja;
            ja["clock"] = a.alphabet.clock_name(atom.clock);
            ja["rel"] = rel_to_string(atom.rel);
            ja["const"] = atom.constant;
            jt["guard"].push_back(ja);
        }
        jt["reset"] = t.reset;
        jt["target"] = a.location_names.at(t.target);
        j["transitions"].push_back(jt);
    }
    return j.dump(2) + "\n";
}

}  // namespace rerl
