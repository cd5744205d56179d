#include "updatepi/trace_io.hpp"

#include <json.hpp>

#include "updatepi/congruence.hpp"
#include "updatepi/syntax.hpp"

namespace updatepi {

namespace {

using nlohmann::json;

json state_json(const StateMultiset& s) {
  json j = json::object();
  for (const auto& [n, c] : s.entries()) j[to_string(n)] = c;
  return j;
}

StateMultiset state_from(const json& j) {
  StateMultiset s;
  for (const auto& [k, v] : j.items()) s.add(parse_name(k), v.get<std::size_t>());
  return s;
}

json substitution_json(const Substitution& theta) {
  json names = json::object();
  for (const auto& [k, v] : theta.name_map()) names[to_string(k)] = to_string(v);
  json procs = json::object();
  for (const auto& [k, v] : theta.proc_map()) procs[k.ident] = print(v);
  return {{"names", names}, {"processes", procs}};
}

Process term_from(const json& j) {
  ParseOptions opts;
  opts.file = "<trace>";
  return parse(j.get<std::string>(), opts);
}

Substitution substitution_from(const json& j) {
  Substitution theta;
  for (const auto& [k, v] : j.at("names").items()) {
    theta.bind(parse_name(k), parse_name(v.get<std::string>()));
  }
  for (const auto& [k, v] : j.at("processes").items()) {
    theta.bind(ProcessVar(k), term_from(v));
  }
  return theta;
}

json step_json(const StepRecord& s) {
  json j;
  j["rule"] = s.rule;
  j["positionPath"] = s.position;
  j["partnerPath"] = s.partner ? json(*s.partner) : json(nullptr);
  j["preTerm"] = print(s.preTerm);
  j["postTerm"] = print(s.postTerm);
  j["preState"] = state_json(s.preState);
  j["postState"] = state_json(s.postState);
  j["substitution"] = substitution_json(s.substitution);
  j["derivation"] = s.derivation;
  if (s.update) j["update"] = std::string(to_string(*s.update));
  if (s.restored) j["restored"] = print(*s.restored);
  return j;
}

StepRecord step_from(const json& j) {
  StepRecord s;
  s.rule = j.at("rule").get<std::string>();
  s.position = j.at("positionPath").get<Path>();
  if (j.contains("partnerPath") && !j["partnerPath"].is_null()) {
    s.partner = j["partnerPath"].get<Path>();
  }
  s.preTerm = term_from(j.at("preTerm"));
  s.postTerm = term_from(j.at("postTerm"));
  s.preState = state_from(j.at("preState"));
  s.postState = state_from(j.at("postState"));
  s.substitution = substitution_from(j.at("substitution"));
  if (j.contains("derivation")) {
    s.derivation = j["derivation"].get<std::vector<std::string>>();
  }
  if (j.contains("update")) {
    std::string u = j["update"].get<std::string>();
    for (auto k : {UpdateKind::Ok, UpdateKind::UnMat, UpdateKind::Rest,
                   UpdateKind::Fail}) {
      if (to_string(k) == u) s.update = k;
    }
  }
  if (j.contains("restored")) s.restored = term_from(j["restored"]);
  return s;
}

std::size_t block_index(const Process& term, const Path& at) {
  auto blocks = blocked_positions(term);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i] == at) return i;
  }
  throw TraceError("no blocked process at " + to_string(at));
}

}  // namespace

std::string export_trace(const TraceDocument& doc) {
  json j;
  j["schemaVersion"] = doc.schemaVersion;
  j["initialTerm"] = print(doc.initialTerm);
  j["flags"] = {{"allowBlockedSteps", doc.flags.allowBlocked},
                {"seqBoth", doc.flags.seqBoth}};
  json steps = json::array();
  for (const auto& s : doc.steps) steps.push_back(step_json(s));
  j["steps"] = std::move(steps);
  return j.dump(2) + "\n";
}

std::string export_trace(const Engine& engine) {
  return export_trace(
      TraceDocument{kTraceSchemaVersion, engine.initial(), engine.flags(),
                    engine.trace()});
}

TraceDocument import_trace(std::string_view text) {
  try {
    json j = json::parse(text);
    TraceDocument doc;
    doc.schemaVersion = j.at("schemaVersion").get<int>();
    if (doc.schemaVersion != kTraceSchemaVersion) {
      throw TraceError("unsupported schemaVersion " +
                       std::to_string(doc.schemaVersion));
    }
    doc.initialTerm = term_from(j.at("initialTerm"));
    if (j.contains("flags")) {
      doc.flags.allowBlocked = j["flags"].value("allowBlockedSteps", false);
      doc.flags.seqBoth = j["flags"].value("seqBoth", false);
    }
    for (const auto& s : j.at("steps")) doc.steps.push_back(step_from(s));
    return doc;
  } catch (const json::exception& e) {
    throw TraceError(std::string("malformed trace: ") + e.what());
  } catch (const ParseError& e) {
    throw TraceError(std::string("malformed term in trace: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw TraceError(std::string("malformed trace: ") + e.what());
  }
}

Configuration replay(const TraceDocument& doc) {
  Engine engine(doc.initialTerm, doc.flags);
  for (std::size_t i = 0; i < doc.steps.size(); ++i) {
    const StepRecord& want = doc.steps[i];
    if (want.rule == "Recover") {
      engine.recover(block_index(engine.current().term, want.position));
      continue;
    }
    if (want.rule == "Unblock") {
      engine.unblock(block_index(engine.current().term, want.position));
      continue;
    }
    std::string post = normalize(want.postTerm).key;
    bool done = false;
    for (const auto& s : engine.steps()) {
      if (s.rule == want.rule && s.position == want.position &&
          s.partner == want.partner && normalize(s.postTerm).key == post) {
        engine.apply(s);
        done = true;
        break;
      }
    }
    if (!done) {
      throw TraceError("step " + std::to_string(i) + " (" + want.rule +
                       ") does not apply");
    }
  }
  return engine.current();
}

}  // namespace updatepi
