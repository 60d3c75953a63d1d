#include "ionls/purification.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace ionls {

using json = nlohmann::ordered_json;

namespace {

Side parse_side(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "A" || s == "a") return Side::A;
  if (s == "B" || s == "b") return Side::B;
  throw CircuitError("side must be \"A\" or \"B\", got \"" + s + "\"");
}

Relation parse_relation(const std::string& s) {
  if (s == "coincident") return Relation::coincident;
  if (s == "anticoincident") return Relation::anticoincident;
  throw CircuitError("relation must be \"coincident\" or \"anticoincident\", got \"" + s + "\"");
}

json op_to_json(const Instruction& op) {
  if (const auto* g = std::get_if<TwoQubitGateOp>(&op)) {
    return {{"kind", g->kind == TwoQubitKind::CNOT ? "cnot" : "cz"},
            {"side", g->side == Side::A ? "A" : "B"},
            {"control", g->control_pair},
            {"target", g->target_pair}};
  }
  if (const auto* c = std::get_if<CliffordOp>(&op)) {
    return {{"kind", "clifford"},
            {"pair", c->pair},
            {"side", c->side == Side::A ? "A" : "B"},
            {"index", c->clifford_index}};
  }
  const auto& m = std::get<MeasureOp>(op);
  return {{"kind", "measure"},
          {"pair", m.pair},
          {"side", m.side == Side::A ? "A" : "B"},
          {"basis", to_string(m.basis)},
          {"label", m.label}};
}

Instruction op_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "cnot" || kind == "cz") {
    return TwoQubitGateOp{kind == "cnot" ? TwoQubitKind::CNOT : TwoQubitKind::CZ, parse_side(j.at("side")),
                          j.at("control").get<int>(), j.at("target").get<int>()};
  }
  if (kind == "clifford") {
    return CliffordOp{j.at("pair").get<int>(), parse_side(j.at("side")), j.at("index").get<int>()};
  }
  if (kind == "measure") {
    try {
      return MeasureOp{j.at("pair").get<int>(), parse_side(j.at("side")),
                       parse_basis(j.at("basis").get<std::string>()), j.at("label").get<std::string>()};
    } catch (const CircuitError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw CircuitError(e.what());
    }
  }
  throw CircuitError("unknown instruction kind \"" + kind + "\"");
}

}  // namespace

std::string circuit_to_json(const PurificationCircuit& circuit, int indent) {
  json ops = json::array();
  for (const auto& op : circuit.ops) ops.push_back(op_to_json(op));
  json accept = json::array();
  for (const auto& c : circuit.accept) {
    accept.push_back({{"labels", {c.first, c.second}},
                      {"relation", c.relation == Relation::coincident ? "coincident" : "anticoincident"}});
  }
  json doc;
  doc["n_pairs"] = circuit.n_pairs;
  doc["ops"] = ops;
  doc["accept"] = accept;
  return doc.dump(indent);
}

PurificationCircuit circuit_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CircuitError(std::string("circuit JSON does not parse: ") + e.what());
  }
  PurificationCircuit circuit;
  try {
    circuit.n_pairs = doc.at("n_pairs").get<int>();
    for (const auto& op : doc.at("ops")) circuit.ops.push_back(op_from_json(op));
    if (doc.contains("accept")) {
      for (const auto& c : doc.at("accept")) {
        const auto& labels = c.at("labels");
        if (!labels.is_array() || labels.size() != 2) {
          throw CircuitError("accept constraint needs exactly two labels");
        }
        circuit.accept.push_back({labels[0].get<std::string>(), labels[1].get<std::string>(),
                                  parse_relation(c.at("relation").get<std::string>())});
      }
    }
  } catch (const json::exception& e) {
    throw CircuitError(std::string("malformed circuit JSON: ") + e.what());
  }
  validate(circuit);
  return circuit;
}

PurificationCircuit load_circuit(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open circuit file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return circuit_from_json(buf.str());
}

void save_circuit(const PurificationCircuit& circuit, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write circuit file " + path.string());
  out << circuit_to_json(circuit) << '\n';
}

}  // namespace ionls
