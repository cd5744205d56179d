#include <CLI11.hpp>

#include <cstdlib>
#include <deque>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "updatepi/congruence.hpp"
#include "updatepi/engine.hpp"
#include "updatepi/lts.hpp"
#include "updatepi/syntax.hpp"
#include "updatepi/trace_io.hpp"

using namespace updatepi;

namespace {

enum Exit { kOk = 0, kUsage = 1, kParse = 2, kCounterexample = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Process load(const std::string& path) {
  ParseOptions opts;
  opts.file = path;
  return parse(read_file(path), opts);
}

std::string describe(const StepRecord& s) {
  std::string out = s.rule + " at " + to_string(s.position);
  if (s.partner) out += " with " + to_string(*s.partner);
  return out;
}

void print_config(std::ostream& os, const Configuration& c) {
  os << "term:  " << print(c.term) << "\n"
     << "state: " << to_string(c.state) << "\n";
}

void print_steps(std::ostream& os, const std::vector<StepRecord>& steps) {
  if (steps.empty()) {
    os << "no redexes\n";
    return;
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    os << "[" << i << "] " << describe(steps[i]) << "\n"
       << "    -> " << print(steps[i].postTerm) << "\n";
  }
}

std::uint64_t effective_seed(std::uint64_t seed) {
  if (const char* env = std::getenv("UPDATEPI_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("UPDATEPI_SEED is not a number: ") + env);
    }
  }
  return seed;
}

struct RunOptions {
  std::size_t fuel = 100;
  std::string policy = "first";
  std::uint64_t seed = 0;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--fuel", o.fuel, "maximum number of steps")->capture_default_str();
  cmd->add_option("--policy", o.policy, "scheduling policy")
      ->check(CLI::IsMember({"first", "random"}))
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "seed of the random policy")->capture_default_str();
}

Policy make_policy(const RunOptions& o) {
  if (o.policy == "random") return Policy::random(effective_seed(o.seed));
  return Policy::first();
}

void run_verbose(Engine& engine, const RunOptions& o, std::ostream& os) {
  std::size_t before = engine.trace().size();
  engine.run(o.fuel, make_policy(o));
  for (std::size_t i = before; i < engine.trace().size(); ++i) {
    os << i + 1 << ". " << describe(engine.trace()[i]) << "\n";
  }
}

// Breadth-first over all transitions, symbolic inputs included.
void dump_lts(std::ostream& os, const Process& p, std::size_t depth,
              const EngineFlags& flags) {
  LtsOptions opts{flags, false};
  CanonicalForm start = normalize(p);
  std::set<std::string> seen{start.key};
  std::deque<std::pair<Process, std::size_t>> queue{{start.term, 0}};
  std::size_t edges = 0;
  while (!queue.empty()) {
    auto [term, d] = queue.front();
    queue.pop_front();
    if (d >= depth) continue;
    for (const auto& t : transitions(term, opts)) {
      ++edges;
      os << print(t.source) << "\n  --" << to_string(t.label) << "--> "
         << print(t.target) << "   [" << t.rule << "]\n";
      CanonicalForm cf = normalize(t.target);
      if (seen.insert(cf.key).second) queue.emplace_back(cf.term, d + 1);
    }
  }
  os << seen.size() << " states, " << edges << " transitions\n";
}

void repl(const std::optional<std::string>& file, const EngineFlags& flags) {
  std::optional<Engine> engine;
  if (file) engine.emplace(load(*file), flags);
  auto need = [&]() -> Engine& {
    if (!engine) throw UsageError("no term loaded");
    return *engine;
  };
  std::string line;
  std::cout << "> " << std::flush;
  while (std::getline(std::cin, line)) {
    std::istringstream in(line);
    std::string cmd;
    in >> cmd;
    try {
      if (cmd.empty()) {
      } else if (cmd == "quit" || cmd == "exit") {
        return;
      } else if (cmd == "help") {
        std::cout << "load FILE | term TEXT | steps | fire I | recover I | unblock I"
                     " | blocked | show | trace | export FILE | quit\n";
      } else if (cmd == "load") {
        std::string path;
        in >> path;
        engine.emplace(load(path), flags);
        print_config(std::cout, engine->current());
      } else if (cmd == "term") {
        std::string rest;
        std::getline(in, rest);
        engine.emplace(parse(rest), flags);
        print_config(std::cout, engine->current());
      } else if (cmd == "steps") {
        print_steps(std::cout, need().steps());
      } else if (cmd == "fire" || cmd == "recover" || cmd == "unblock") {
        std::size_t i;
        if (!(in >> i)) throw UsageError(cmd + " needs an index");
        Engine& e = need();
        const StepRecord* s;
        if (cmd == "fire") {
          if (i >= e.steps().size()) throw UsageError("no redex " + std::to_string(i));
          s = &e.fire(i);
        } else if (cmd == "recover") {
          s = &e.recover(i);
        } else {
          s = &e.unblock(i);
        }
        std::cout << describe(*s) << "\n";
        print_config(std::cout, e.current());
      } else if (cmd == "blocked") {
        auto ps = blocked_positions(need().current().term);
        for (std::size_t i = 0; i < ps.size(); ++i) {
          std::cout << "[" << i << "] " << to_string(ps[i]) << "  "
                    << print(subterm_at(need().current().term, ps[i])) << "\n";
        }
        if (ps.empty()) std::cout << "nothing blocked\n";
      } else if (cmd == "show") {
        print_config(std::cout, need().current());
      } else if (cmd == "trace") {
        const auto& tr = need().trace();
        for (std::size_t i = 0; i < tr.size(); ++i) {
          std::cout << i + 1 << ". " << describe(tr[i]) << "\n";
        }
      } else if (cmd == "export") {
        std::string path;
        in >> path;
        std::ofstream(path) << export_trace(need());
      } else {
        std::cout << "unknown command " << cmd << "\n";
      }
    } catch (const ParseError& e) {
      std::cout << e.what() << "\n";
    } catch (const std::exception& e) {
      std::cout << "error: " << e.what() << "\n";
    }
    std::cout << "> " << std::flush;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explorer for the update pi-calculus"};
  app.require_subcommand(1);
  EngineFlags flags;
  app.add_flag("--allow-blocked-steps", flags.allowBlocked,
               "reduce inside blocked processes");
  app.add_flag("--seq-both", flags.seqBoth, "step both sides of a sequence at once");

  std::string file;
  auto file_arg = [&](CLI::App* c) {
    c->add_option("file", file, ".upi file")->required();
  };

  RunOptions run;
  auto* reduce = app.add_subcommand("reduce", "run a schedule and print the result");
  file_arg(reduce);
  add_run_options(reduce, run);

  auto* steps = app.add_subcommand("steps", "list the redexes of a term");
  file_arg(steps);

  std::size_t index = 0;
  auto* fire = app.add_subcommand("fire", "fire one redex");
  file_arg(fire);
  fire->add_option("--index", index, "redex number from `steps`")->required();

  std::size_t depth = 1;
  auto* lts = app.add_subcommand("lts", "print the transition graph");
  file_arg(lts);
  lts->add_option("--depth", depth)->capture_default_str();

  CorrespondenceOptions check_opts;
  bool lts_blocked = false, lts_seq = false;
  double budget = 0;
  auto* check = app.add_subcommand("check", "compare reductions with tau transitions");
  check->add_option("--bound", check_opts.bound, "largest term size")->capture_default_str();
  check->add_option("--closure-depth", check_opts.closureDepth)->capture_default_str();
  check->add_option("--budget", budget, "give up after this many seconds");
  check->add_flag("--lts-allow-blocked-steps", lts_blocked,
                  "transition system flag, must agree with --allow-blocked-steps");
  check->add_flag("--lts-seq-both", lts_seq,
                  "transition system flag, must agree with --seq-both");

  auto* normalize_cmd = app.add_subcommand("normalize", "print the canonical form");
  file_arg(normalize_cmd);

  std::string trace_out;
  auto* exp = app.add_subcommand("export", "run a schedule and write its trace");
  file_arg(exp);
  exp->add_option("--trace", trace_out, "output file, - for stdout")->required();
  add_run_options(exp, run);

  auto* rep = app.add_subcommand("replay", "replay a trace and print the result");
  rep->add_option("trace", file, "trace file")->required();

  std::optional<std::string> repl_file;
  auto* rpl = app.add_subcommand("repl", "interactive stepper");
  rpl->add_option("file", repl_file);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*reduce) {
      Engine engine(load(file), flags);
      run_verbose(engine, run, std::cout);
      print_config(std::cout, engine.current());
    } else if (*steps) {
      print_steps(std::cout, enumerate_steps(Configuration::of(load(file)), flags));
    } else if (*fire) {
      Engine engine(load(file), flags);
      auto available = engine.steps();
      if (index >= available.size()) {
        throw UsageError("index " + std::to_string(index) + " out of range, " +
                         std::to_string(available.size()) + " redexes");
      }
      std::cout << describe(engine.fire(index)) << "\n";
      print_config(std::cout, engine.current());
    } else if (*lts) {
      dump_lts(std::cout, load(file), depth, flags);
    } else if (*check) {
      check_opts.engineFlags = flags;
      // unset transition-system flags follow the engine's
      check_opts.ltsFlags = flags;
      if (check->count("--lts-allow-blocked-steps")) check_opts.ltsFlags.allowBlocked = lts_blocked;
      if (check->count("--lts-seq-both")) check_opts.ltsFlags.seqBoth = lts_seq;
      if (budget > 0) {
        check_opts.budget = std::chrono::milliseconds(static_cast<long long>(budget * 1000));
      }
      CorrespondenceReport r;
      try {
        r = correspondence_check(check_opts);
      } catch (const FlagMismatch& e) {
        std::cerr << "refusing to compare: " << e.what() << "\n";
        return kUsage;
      }
      std::cout << r.termsChecked << " terms, " << r.counterexampleCount
                << " counterexamples" << (r.complete ? "" : " (budget exhausted)") << "\n";
      for (const auto& c : r.counterexamples) {
        std::cout << "counterexample: " << print(c.term) << "\n";
        for (const auto& s : c.onlyReduction) std::cout << "  reduction only: " << s << "\n";
        for (const auto& s : c.onlyLts) std::cout << "  transitions only: " << s << "\n";
      }
      if (r.counterexampleCount > 0) return kCounterexample;
      std::cout << (r.complete ? "pass\n" : "incomplete\n");
    } else if (*normalize_cmd) {
      std::cout << print(normalize(load(file)).term) << "\n";
    } else if (*exp) {
      Engine engine(load(file), flags);
      run_verbose(engine, run, std::cerr);
      std::string doc = export_trace(engine);
      if (trace_out == "-") {
        std::cout << doc;
      } else {
        std::ofstream out(trace_out, std::ios::binary);
        if (!out) throw UsageError("cannot write " + trace_out);
        out << doc;
      }
    } else if (*rep) {
      print_config(std::cout, replay(import_trace(read_file(file))));
    } else if (*rpl) {
      repl(repl_file, flags);
    }
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kParse;
  } catch (const TraceError& e) {
    std::cerr << "trace: " << e.what() << "\n";
    return kParse;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const RecoveryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}
