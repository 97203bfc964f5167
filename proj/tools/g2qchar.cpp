// Command-line front end: q-characters, module-system verification,
// dominant classification, irreducibility witnesses, restriction to the
// finite-type character ring, and cluster-mutation runs.

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "g2q/cluster.hpp"
#include "g2q/errors.hpp"
#include "g2q/fm.hpp"
#include "g2q/minaff.hpp"
#include "g2q/monomial.hpp"
#include "g2q/polynomial.hpp"

namespace {

using namespace g2q;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCap = 3;

// Default s placing the instance on the standard normalization, where the
// equation's lowest spectral shift is symmetric about zero.
int normalized_s(EqFamily family, int k, int l) {
  return family == EqFamily::Eq1 ? -6 * k - 2 * l + 1 : -6 * k - 2 * l - 5;
}

struct InstanceOpts {
  int family = 1;
  int k = 1;
  int l = 1;
  int s_value = 0;
  CLI::Option* s_opt = nullptr;
  std::vector<int> sweep;  // empty, or {KMAX, LMAX}

  EqFamily eq_family() const {
    return family == 1 ? EqFamily::Eq1 : EqFamily::Eq2;
  }

  std::optional<int> s() const {
    if (s_opt != nullptr && s_opt->count() > 0) return s_value;
    return std::nullopt;
  }

  std::vector<EquationInstance> instances() const {
    std::vector<EquationInstance> out;
    std::optional<int> fixed_s = s();
    if (sweep.empty()) {
      EquationInstance eq{eq_family(), k, l, 0, false};
      eq.s = fixed_s ? *fixed_s : normalized_s(eq.family, k, l);
      out.push_back(eq);
    } else {
      if (sweep[0] < 1 || sweep[1] < 1) {
        throw std::invalid_argument("--sweep bounds must be >= 1");
      }
      for (int kk = 1; kk <= sweep[0]; ++kk) {
        for (int ll = 1; ll <= sweep[1]; ++ll) {
          EquationInstance eq{eq_family(), kk, ll, 0, false};
          eq.s = fixed_s ? *fixed_s : normalized_s(eq.family, kk, ll);
          out.push_back(eq);
        }
      }
    }
    return out;
  }
};

void add_instance_options(CLI::App* sub, InstanceOpts& opts, bool allow_sweep) {
  sub->add_option("--family", opts.family, "equation family (1 or 2)")
      ->required()
      ->check(CLI::IsMember({1, 2}));
  sub->add_option("--k", opts.k, "index k");
  sub->add_option("--l", opts.l, "index l");
  opts.s_opt = sub->add_option(
      "--s", opts.s_value,
      "spectral shift s (default: the symmetric normalization)");
  if (allow_sweep) {
    sub->add_option("--sweep", opts.sweep,
                    "verify all k in 1..KMAX, l in 1..LMAX instead of one instance")
        ->expected(2);
  }
}

nlohmann::json eq_json(const EquationInstance& eq) {
  return {{"family", eq.family == EqFamily::Eq1 ? 1 : 2},
          {"k", eq.k},
          {"l", eq.l},
          {"s", eq.s},
          {"dual", eq.dual}};
}

// Per-instance outcome of a (possibly fanned-out) verification.
struct Outcome {
  int code = kExitPass;
  std::string error;       // non-empty iff an exception was mapped
  nlohmann::json report;   // JSON form of the result
  std::string text;        // text form of the result
};

int classify_exception(const std::exception& e) {
  if (dynamic_cast<const CapExceededError*>(&e)) return kExitCap;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return kExitUsage;
  return kExitFail;
}

template <typename Fn>
void run_pool(std::size_t n, Fn&& task) {
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, n == 0 ? 1 : n));
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      task(i);
    }
  };
  std::vector<std::thread> threads;
  for (unsigned w = 1; w < workers; ++w) threads.emplace_back(loop);
  loop();
  for (auto& t : threads) t.join();
}

int finish(const std::string& format, const std::string& mode,
           const std::vector<Outcome>& outcomes) {
  if (format == "json") {
    nlohmann::json j;
    j["mode"] = mode;
    auto arr = nlohmann::json::array();
    for (const auto& o : outcomes) arr.push_back(o.report);
    j["reports"] = std::move(arr);
    std::cout << j.dump() << "\n";
  } else {
    for (const auto& o : outcomes) std::cout << o.text << "\n";
  }
  for (const auto& o : outcomes) {
    if (o.code != kExitPass) return o.code;
  }
  return kExitPass;
}

int cmd_verify(const std::string& mode, const InstanceOpts& opts,
               const std::string& format, const FmCaps& caps) {
  std::vector<EquationInstance> eqs = opts.instances();
  if (mode == "dual") {
    for (auto& eq : eqs) eq.dual = true;
  }
  CharacterCache cache;
  std::vector<Outcome> outcomes(eqs.size());
  run_pool(eqs.size(), [&](std::size_t i) {
    const EquationInstance& eq = eqs[i];
    Outcome& o = outcomes[i];
    try {
      if (mode == "mrestrict") {
        MSystemReport rep = verify_m_system(eq, cache, caps);
        o.code = rep.pass ? kExitPass : kExitFail;
        o.report = {{"equation", eq_json(eq)},
                    {"pass", rep.pass},
                    {"lhs_dimension", rep.lhs_dimension.str()},
                    {"rhs_dimension", rep.rhs_dimension.str()}};
        o.text = eq.str() + " [mrestrict]: " +
                 (rep.pass ? "PASS" : "FAIL") +
                 " dimension " + rep.lhs_dimension.str() + " vs " +
                 rep.rhs_dimension.str();
      } else {
        VerifyReport rep = verify_equation(eq, cache, caps);
        o.code = rep.pass ? kExitPass : kExitFail;
        o.report = nlohmann::json::parse(rep.json());
        o.text = eq.str() + " [" + mode + "]: " +
                 (rep.pass ? "PASS" : "FAIL") +
                 " lhs_terms=" + std::to_string(rep.lhs_terms) +
                 " rhs_terms=" + std::to_string(rep.rhs_terms);
        if (rep.mismatch) {
          o.text += " mismatch at " + rep.mismatch->m.str() + ": lhs=" +
                    rep.mismatch->lhs_coeff.str() + " rhs=" +
                    rep.mismatch->rhs_coeff.str();
        }
      }
    } catch (const std::exception& e) {
      o.code = classify_exception(e);
      o.error = e.what();
      o.report = {{"equation", eq_json(eq)}, {"error", o.error}};
      o.text = eq.str() + " [" + mode + "]: ERROR " + o.error;
    }
  });
  return finish(format, mode, outcomes);
}

int cmd_classify(const InstanceOpts& opts, const std::string& format,
                 const FmCaps& caps) {
  CharacterCache cache;
  std::vector<EquationInstance> eqs = opts.instances();
  std::vector<Outcome> outcomes(eqs.size());
  run_pool(eqs.size(), [&](std::size_t i) {
    const EquationInstance& eq = eqs[i];
    Outcome& o = outcomes[i];
    try {
      DominantClassification cls = classify_dominant(eq, cache, caps);
      auto strs = [](const std::vector<Monomial>& ms) {
        auto arr = nlohmann::json::array();
        for (const auto& m : ms) arr.push_back(m.str());
        return arr;
      };
      o.report = {{"equation", eq_json(eq)},
                  {"lhs", strs(cls.lhs)},
                  {"rhs1", strs(cls.rhs1)},
                  {"rhs2", strs(cls.rhs2)},
                  {"chain", strs(cls.chain)}};
      auto join = [](const std::vector<Monomial>& ms) {
        std::string out;
        for (std::size_t t = 0; t < ms.size(); ++t) {
          if (t) out += " ; ";
          out += ms[t].str();
        }
        return out;
      };
      o.text = eq.str() + " dominant monomials\n  lhs:  " + join(cls.lhs) +
               "\n  rhs1: " + join(cls.rhs1) + "\n  rhs2: " + join(cls.rhs2) +
               "\n  chain: " + join(cls.chain);
    } catch (const std::exception& e) {
      o.code = classify_exception(e);
      o.error = e.what();
      o.report = {{"equation", eq_json(eq)}, {"error", o.error}};
      o.text = eq.str() + " [classify]: ERROR " + o.error;
    }
  });
  return finish(format, "classify", outcomes);
}

int cmd_witnesses(const InstanceOpts& opts, const std::string& format,
                  const FmCaps& caps) {
  CharacterCache cache;
  std::vector<EquationInstance> eqs = opts.instances();
  std::vector<Outcome> outcomes(eqs.size());
  run_pool(eqs.size(), [&](std::size_t i) {
    const EquationInstance& eq = eqs[i];
    Outcome& o = outcomes[i];
    try {
      WitnessReport rep = irreducibility_witnesses(eq, cache, caps);
      o.code = rep.pass ? kExitPass : kExitFail;
      auto arr = nlohmann::json::array();
      for (const auto& w : rep.entries) {
        arr.push_back({{"r", w.r},
                       {"n", w.n.str()},
                       {"absent_from_product", w.absent_from_product},
                       {"sl2_reachable", w.sl2_reachable}});
      }
      o.report = {{"equation", eq_json(eq)},
                  {"pass", rep.pass},
                  {"witnesses", std::move(arr)}};
      o.text = eq.str() + " [witnesses]: " + (rep.pass ? "PASS" : "FAIL");
      for (const auto& w : rep.entries) {
        o.text += "\n  r=" + std::to_string(w.r) + " n=" + w.n.str() +
                  " absent=" + (w.absent_from_product ? "true" : "false") +
                  " reachable=" + (w.sl2_reachable ? "true" : "false");
      }
    } catch (const std::exception& e) {
      o.code = classify_exception(e);
      o.error = e.what();
      o.report = {{"equation", eq_json(eq)}, {"error", o.error}};
      o.text = eq.str() + " [witnesses]: ERROR " + o.error;
    }
  });
  return finish(format, "witnesses", outcomes);
}

int cmd_qchar(const std::string& label, const std::string& monomial,
              const std::string& format, const FmCaps& caps) {
  CharacterCache cache;
  Monomial head;
  if (!label.empty()) {
    auto lab = parse_module_label(label);
    if (!lab) {
      std::cerr << "error: bad label '" << label
                << "' (expected T:k,l,s or Td:k,l,s)\n";
      return kExitUsage;
    }
    head = highest_monomial(*lab);
  } else {
    head = Monomial::parse(monomial);
  }
  QPolynomial p = cache.qchar(head, caps);
  if (format == "json") {
    nlohmann::json j;
    j["head"] = head.str();
    j["terms"] = p.term_count();
    j["character"] = nlohmann::json::parse(p.json());
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "head: " << head.str() << "\n"
              << "terms: " << p.term_count() << "\n"
              << p.str() << "\n";
  }
  return kExitPass;
}

int cmd_restrict(const std::string& label, const std::string& format,
                 const FmCaps& caps) {
  auto lab = parse_module_label(label);
  if (!lab) {
    std::cerr << "error: bad label '" << label
              << "' (expected T:k,l,s or Td:k,l,s)\n";
    return kExitUsage;
  }
  CharacterCache cache;
  QPolynomial p = label_character(*lab, cache, caps);
  WeightPolynomial w = restrict_to_Uqg(p);
  if (format == "json") {
    nlohmann::json j;
    j["label"] = lab->str();
    j["dimension"] = w.dimension().str();
    auto arr = nlohmann::json::array();
    for (const auto& t : w.terms()) {
      arr.push_back({t.w.first, t.w.second, t.c.str()});
    }
    j["weights"] = std::move(arr);
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "label: " << lab->str() << "\n"
              << "dimension: " << w.dimension().str() << "\n"
              << w.str() << "\n";
  }
  return kExitPass;
}

int cmd_mutate(const std::string& plan_text, int rows, const std::string& mode,
               const std::string& format, const FmCaps& caps) {
  ColumnPlan plan;
  plan.rows = rows;
  std::size_t pos = 0;
  while (pos < plan_text.size()) {
    std::size_t comma = plan_text.find(',', pos);
    std::string tok = plan_text.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (tok.size() != 2 || (tok[0] != 'C' && tok[0] != 'c') ||
        tok[1] < '1' || tok[1] > '4') {
      std::cerr << "error: bad plan entry '" << tok
                << "' (expected C1..C4)\n";
      return kExitUsage;
    }
    plan.columns.push_back(tok[1] - '0');
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (plan.columns.empty()) {
    std::cerr << "error: empty plan\n";
    return kExitUsage;
  }
  PayloadMode pmode =
      mode == "value" ? PayloadMode::Value : PayloadMode::Symbolic;
  CharacterCache cache;
  Trace trace = run_columns(plan, pmode,
                            pmode == PayloadMode::Value ? &cache : nullptr,
                            caps);
  MatchReport match = match_msystem(trace);
  bool labeled_ok = true;
  for (const auto& row : match.rows) {
    if (!row.produced_label.empty() && !row.ok) labeled_ok = false;
  }
  if (format == "json") {
    nlohmann::json j;
    j["plan"] = plan.columns;
    j["rows"] = plan.rows;
    j["mode"] = mode;
    j["trace"] = nlohmann::json::parse(trace_json(trace));
    j["match"] = nlohmann::json::parse(match.json());
    j["seed"] = nlohmann::json::parse(seed_json(trace.seed));
    std::cout << j.dump() << "\n";
  } else {
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
      const auto& rec = trace.records[i];
      const auto& row = match.rows[i];
      std::string line = std::to_string(rec.index) + ": mu" +
                         rec.vertex.str() + " -> " +
                         (rec.produced_label.empty() ? std::string("(unlabeled)")
                                                     : rec.produced_label);
      line += "  [" + rec.relation.denominator + " exchange";
      if (row.ok) {
        line += ", matches " + row.equation->str();
      } else if (!rec.produced_label.empty()) {
        line += ", MISMATCH: " + row.detail;
      }
      line += "]";
      std::cout << line << "\n";
    }
    std::cout << "labeled records matched: "
              << (labeled_ok ? "all" : "NOT all") << "\n";
  }
  return labeled_ok ? kExitPass : kExitFail;
}

bool env_to_ll(const char* name, long long& out, std::string& err) {
  const char* v = std::getenv(name);
  if (!v) return true;
  try {
    std::size_t used = 0;
    out = std::stoll(v, &used);
    if (used != std::string(v).size() || out <= 0) throw std::invalid_argument("");
  } catch (const std::exception&) {
    err = std::string("error: ") + name + " must be a positive integer\n";
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "q-characters of type-G2 quantum affine modules: Frenkel-Mukhin "
      "computation, module-system verification, and cluster mutation"};
  app.require_subcommand(1);

  std::string format = "text";
  FmCaps caps;
  long long env_depth = caps.max_depth;
  long long env_terms = static_cast<long long>(caps.max_terms);
  std::string env_err;
  if (!env_to_ll("G2QCHAR_MAX_DEPTH", env_depth, env_err) ||
      !env_to_ll("G2QCHAR_MAX_TERMS", env_terms, env_err)) {
    std::cerr << env_err;
    return kExitUsage;
  }
  caps.max_depth = static_cast<int>(env_depth);
  caps.max_terms = static_cast<std::size_t>(env_terms);

  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("--max-depth", caps.max_depth,
                 "cap on A^{-1} descent depth (env G2QCHAR_MAX_DEPTH)");
  app.add_option("--max-terms", caps.max_terms,
                 "cap on character size (env G2QCHAR_MAX_TERMS)");

  auto* qchar = app.add_subcommand("qchar", "compute one q-character");
  qchar->fallthrough();
  std::string q_label, q_monomial;
  qchar->add_option("--label", q_label, "module label T:k,l,s or Td:k,l,s");
  qchar->add_option("--monomial", q_monomial, "dominant head monomial");

  auto* verify = app.add_subcommand(
      "verify", "verify equations (msystem | dual | mrestrict)");
  verify->fallthrough();
  std::string v_mode;
  verify->add_option("mode", v_mode, "msystem | dual | mrestrict")
      ->required()
      ->check(CLI::IsMember({"msystem", "dual", "mrestrict"}));
  InstanceOpts v_opts;
  add_instance_options(verify, v_opts, true);

  auto* classify =
      app.add_subcommand("classify", "dominant-monomial classification");
  classify->fallthrough();
  InstanceOpts c_opts;
  add_instance_options(classify, c_opts, true);

  auto* witnesses =
      app.add_subcommand("witnesses", "irreducibility witness checks");
  witnesses->fallthrough();
  InstanceOpts w_opts;
  add_instance_options(witnesses, w_opts, true);

  auto* mutate = app.add_subcommand("mutate", "run a column mutation plan");
  mutate->fallthrough();
  std::string m_plan;
  int m_rows = 0;
  std::string m_mode = "value";
  mutate->add_option("--plan", m_plan, "comma-separated columns, e.g. C1,C1,C2")
      ->required();
  mutate->add_option("--rows", m_rows, "mutable rows per column")->required();
  mutate->add_option("--mode", m_mode, "payload mode")
      ->check(CLI::IsMember({"value", "symbolic"}));

  auto* restrict_cmd = app.add_subcommand(
      "restrict", "restrict a module character to the finite-type ring");
  restrict_cmd->fallthrough();
  std::string r_label;
  restrict_cmd->add_option("--label", r_label, "module label")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help
    }
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (qchar->parsed()) {
      if (q_label.empty() == q_monomial.empty()) {
        std::cerr << "error: qchar needs exactly one of --label, --monomial\n";
        return kExitUsage;
      }
      return cmd_qchar(q_label, q_monomial, format, caps);
    }
    if (verify->parsed()) return cmd_verify(v_mode, v_opts, format, caps);
    if (classify->parsed()) return cmd_classify(c_opts, format, caps);
    if (witnesses->parsed()) return cmd_witnesses(w_opts, format, caps);
    if (mutate->parsed()) {
      return cmd_mutate(m_plan, m_rows, m_mode, format, caps);
    }
    if (restrict_cmd->parsed()) return cmd_restrict(r_label, format, caps);
    std::cerr << "error: no subcommand\n";
    return kExitUsage;
  } catch (const CapExceededError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCap;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
