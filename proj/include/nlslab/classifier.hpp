#pragma once

// Breather-nonexistence rules as an executable classifier. Each rule is a
// guarded inequality on measured invariants; the first rule that fires
// precludes a breather.

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "functionals.hpp"
#include "ground_state.hpp"
#include "integrator.hpp"
#include "model.hpp"

namespace nlslab {

enum class Parity { None, Even, Odd };

inline const char* to_string(Parity p) {
    switch (p) {
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    case Parity::None: break;
    }
    return "none";
}

/// Measured or declared invariants. For Gross-Pitaevskii models P, E, M are
/// the nonzero-background P_nz, E (Gross-Pitaevskii energy) and M_nz.
struct InvariantFacts {
    ModelSpec model;
    std::optional<double> P;
    std::optional<double> E;
    std::optional<double> M;
    std::optional<double> P_tilde0;     // initial virial
    std::optional<double> l2_norm;      // ‖u₀‖ (unsquared)
    std::optional<double> grad_l2_at_0; // ‖∇u₀‖ (unsquared)
    std::optional<double> H;            // derivative NLS Hamiltonian
    std::optional<Parity> parity;       // derivative NLS total symmetry
    bool decay_certificate = false;     // decays faster than Q_ω

    std::optional<double> l2() const {
        if (l2_norm) return l2_norm;
        if (M && *M >= 0.0) return std::sqrt(*M);
        return std::nullopt;
    }
};

struct ClassifierConfig {
    double tau0 = 1e-9;
    std::optional<double> eps_small;               // small-mass bound, required by R6
    std::shared_ptr<const ThresholdCache> thresholds; // required by R5 and by R4(ii) for n >= 2
    double drift_limit = 1e-5;
};

enum class VerdictStatus { Precluded, NotPrecluded, Inconclusive };

inline const char* to_string(VerdictStatus s) {
    switch (s) {
    case VerdictStatus::Precluded: return "Precluded";
    case VerdictStatus::NotPrecluded: return "NotPrecluded";
    case VerdictStatus::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct RegimeVerdict {
    VerdictStatus status = VerdictStatus::Inconclusive;
    std::string rule;       // "R4.i", "none", ...
    std::string inequality; // instantiated condition
    std::optional<std::string> table_row;
    std::string regime;     // surviving regime, or what is missing
    std::map<std::string, double> inputs;
    std::optional<double> monotone_fraction;
    std::optional<double> blowup_time;

    /// "R4.i" -> "R4".
    std::string rule_family() const { return rule.substr(0, rule.find('.')); }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["status"] = to_string(status);
        j["rule"] = rule;
        j["inequality"] = inequality;
        j["table_row"] = table_row ? nlohmann::json(*table_row) : nlohmann::json(nullptr);
        j["regime"] = regime;
        j["inputs"] = inputs;
        if (monotone_fraction) j["monotone_fraction"] = *monotone_fraction;
        if (blowup_time) j["blowup_time"] = *blowup_time;
        return j;
    }
};

// --- rules ----------------------------------------------------------------------

enum class RuleOutcome { NotApplicable, Holds, Fails, Missing };

struct RuleResult {
    RuleOutcome outcome = RuleOutcome::NotApplicable;
    std::string inequality;
    std::optional<std::string> table_row;
    std::vector<std::string> missing;
};

struct Rule {
    std::string id;
    std::function<RuleResult(const InvariantFacts&, const ClassifierConfig&)> eval;
};

namespace detail {

inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

enum class Criticality { Sub, Critical, Super };

inline Criticality criticality(const ModelSpec& m) {
    const double pc = mass_critical_power(m.n);
    if (std::abs(m.p - pc) < 1e-12) return Criticality::Critical;
    return m.p < pc ? Criticality::Sub : Criticality::Super;
}

inline std::string table_of(const ModelSpec& m, int row) {
    const int t = criticality(m) == Criticality::Sub ? 1 : criticality(m) == Criticality::Critical ? 2 : 3;
    return "T" + std::to_string(t) + "." + std::to_string(row);
}

struct Ctx {
    const InvariantFacts& f;
    const ClassifierConfig& c;

    double scale() const { return std::max(1.0, f.M ? std::abs(*f.M) : 0.0); }
    bool zero(double x) const { return std::abs(x) / scale() < c.tau0; }
    bool pos(double x) const { return x > 0.0 && !zero(x); }
    bool neg(double x) const { return x < 0.0 && !zero(x); }
};

inline RuleResult na() { return {}; }

inline RuleResult missing(std::vector<std::string> names) {
    RuleResult r;
    r.outcome = RuleOutcome::Missing;
    r.missing = std::move(names);
    return r;
}

inline RuleResult decide(bool fires, std::string inequality, std::optional<std::string> row = std::nullopt) {
    RuleResult r;
    r.outcome = fires ? RuleOutcome::Holds : RuleOutcome::Fails;
    r.inequality = std::move(inequality);
    r.table_row = std::move(row);
    return r;
}

/// Names of the absent facts among those listed.
inline std::vector<std::string> absent(const InvariantFacts& f, std::initializer_list<const char*> names) {
    std::vector<std::string> out;
    for (const char* n : names) {
        const std::string s(n);
        const bool have = (s == "P" && f.P) || (s == "E" && f.E) || (s == "M" && f.M) ||
                          (s == "P_tilde0" && f.P_tilde0) || (s == "l2_norm" && f.l2()) ||
                          (s == "grad_l2_at_0" && f.grad_l2_at_0) || (s == "H" && f.H) ||
                          (s == "parity" && f.parity);
        if (!have) out.push_back(s);
    }
    return out;
}

/// ∫Q² for the 1-D ground state at ω = 1: ((p+2)/2)^{2/p} (2/p) B(2/p, 1/2).
inline double ground_state_mass_1d(double p) {
    return std::pow((p + 2.0) / 2.0, 2.0 / p) * (2.0 / p) * std::beta(2.0 / p, 0.5);
}

inline bool is(const InvariantFacts& f, Family fam) { return f.model.family == fam; }

// Power NLS ----------------------------------------------------------------------

inline std::vector<Rule> power_rules() {
    std::vector<Rule> rules;
    rules.push_back({"R1", [](const InvariantFacts& f, const ClassifierConfig&) {
                         if (f.model.epsilon != 1) return na();
                         return decide(true, "epsilon = +1 (defocusing)", table_of(f.model, 1));
                     }});
    rules.push_back({"R2", [](const InvariantFacts& f, const ClassifierConfig& c) {
                         if (f.model.epsilon != -1) return na();
                         if (auto m = absent(f, {"P"}); !m.empty()) return missing(m);
                         const Ctx x{f, c};
                         return decide(!x.zero(*f.P), "P = " + num(*f.P) + " != 0", table_of(f.model, 2));
                     }});
    // R3: focusing sign table, each case with P = 0.
    rules.push_back({"R3.1", [](const InvariantFacts& f, const ClassifierConfig& c) {
                         if (f.model.epsilon != -1 || criticality(f.model) == Criticality::Super) return na();
                         if (auto m = absent(f, {"P", "E"}); !m.empty()) return missing(m);
                         const Ctx x{f, c};
                         return decide(x.zero(*f.P) && x.pos(*f.E),
                                       "E = " + num(*f.E) + " > 0 with p = " + num(f.model.p) + " <= 4/n",
                                       table_of(f.model, 3));
                     }});
    rules.push_back({"R3.2", [](const InvariantFacts& f, const ClassifierConfig& c) {
                         if (f.model.epsilon != -1 || criticality(f.model) == Criticality::Critical) return na();
                         if (auto m = absent(f, {"P", "E"}); !m.empty()) return missing(m);
                         const Ctx x{f, c};
                         return decide(x.zero(*f.P) && x.zero(*f.E),
                                       "E = " + num(*f.E) + " = 0 with p = " + num(f.model.p) + " != 4/n",
                                       table_of(f.model, 3));
                     }});
    rules.push_back({"R3.3", [](const InvariantFacts& f, const ClassifierConfig& c) {
                         if (f.model.epsilon != -1 || criticality(f.model) == Criticality::Sub) return na();
                         if (auto m = absent(f, {"P", "E"}); !m.empty()) return missing(m);
                         const Ctx x{f, c};
                         return decide(x.zero(*f.P) && x.neg(*f.E),
                                       "E = " + num(*f.E) + " < 0 with 4/n <= p = " + num(f.model.p) + " < p*",
                                       table_of(f.model, 3));
                     }});
    rules.push_back({"R4.i", [](const InvariantFacts& f, const ClassifierConfig& c) {
                         if (f.model.epsilon != -1 || criticality(f.model) != Criticality::Critical) return na();
                         if (auto m = absent(f, {"P", "E", "P_tilde0"}); !m.empty()) return missing(m);
                         const Ctx x{f, c};
                         return decide(x.zero(*f.P) && x.zero(*f.E) && !x.zero(*f.P_tilde0),
                                       "P = 0, E = 0, P~(0) = " + num(*f.P_tilde0) + " != 0", "T2.5");
                     }});
    rules.push_back({"R4.ii", [](const InvariantFacts& f, const ClassifierConfig& c) {
                         if (f.model.epsilon != -1 || criticality(f.model) != Criticality::Critical) return na();
                         if (auto m = absent(f, {"P", "E", "l2_norm"}); !m.empty()) return missing(m);
                         const Ctx x{f, c};
                         if (!(x.zero(*f.P) && x.zero(*f.E))) return decide(false, "P = 0, E = 0 not met");
                         double q_mass;
                         if (f.model.n == 1) {
                             q_mass = ground_state_mass_1d(f.model.p);
                         } else {
                             std::optional<Thresholds> t;
                             if (c.thresholds) t = c.thresholds->find(f.model.p, f.model.n, 1.0);
                             if (!t) return missing({"ground-state threshold ||Q||"});
                             q_mass = t->mass;
                         }
                         const double l2 = *f.l2(), lq = std::sqrt(q_mass);
                         return decide(l2 < lq && !x.zero(l2 - lq),
                                       "P = 0, E = 0, ||u||_L2 = " + num(l2) + " < ||Q||_L2 = " + num(lq) +
                                           " (unsquared L2 norms)",
                                       "T2.4");
                     }});
    rules.push_back({"R5", [](const InvariantFacts& f, const ClassifierConfig& c) {
                         if (f.model.epsilon != -1 || criticality(f.model) != Criticality::Super) return na();
                         if (auto m = absent(f, {"P", "E", "M", "grad_l2_at_0"}); !m.empty()) return missing(m);
                         const Ctx x{f, c};
                         if (!(x.zero(*f.P) && x.pos(*f.E))) return decide(false, "P = 0, E > 0 not met");
                         std::optional<Thresholds> t;
                         if (c.thresholds) t = c.thresholds->find_star(f.model.p, f.model.n);
                         if (!t) return missing({"ground-state threshold Q*"});
                         const double sc = critical_regularity(f.model.p, f.model.n);
                         const double lhs = std::pow(*f.E, sc) * std::pow(*f.M, 1.0 - sc);
                         const double rhs = std::pow(t->energy, sc) * std::pow(t->mass, 1.0 - sc);
                         const double g = std::pow(*f.grad_l2_at_0, sc) * std::pow(*f.M, 1.0 - sc);
                         const double gq = std::pow(t->grad_norm(), sc) * std::pow(t->mass, 1.0 - sc);
                         const bool below = lhs < rhs && std::abs(lhs - rhs) / std::max(1.0, rhs) >= c.tau0;
                         const bool differs = std::abs(g - gq) / std::max(1.0, gq) >= c.tau0;
                         return decide(below && differs,
                                       "E^sc M^(1-sc) = " + num(lhs) + " < " + num(rhs) +
                                           " and ||grad u0||^sc M^(1-sc) = " + num(g) + " != " + num(gq) +
                                           " (sc = " + num(sc) + ")",
                                       "T3.4");
                     }});
    rules.push_back({"R6", [](const InvariantFacts& f, const ClassifierConfig& c) {
                         if (f.model.epsilon != -1 || f.model.n != 1 || f.model.p < 2.0 || f.model.p >= 4.0)
                             return na();
                         // without a smallness bound and a decay certificate the rule is silent
                         if (!c.eps_small || !f.decay_certificate) return na();
                         if (auto m = absent(f, {"P", "E", "l2_norm"}); !m.empty()) return missing(m);
                         const Ctx x{f, c};
                         const double l2 = *f.l2();
                         return decide(x.zero(*f.P) && x.neg(*f.E) && l2 < *c.eps_small,
                                       "P = 0, E = " + num(*f.E) + " < 0, ||u0||_L2 = " + num(l2) +
                                           " < eps_small = " + num(*c.eps_small) + ", decay certificate",
                                       "T1.4");
                     }});
    return rules;
}

// Gross-Pitaevskii ---------------------------------------------------------------

inline std::vector<Rule> gp_rules() {
    auto make = [](std::string id, double p, int n, auto cond) {
        return Rule{id, [=](const InvariantFacts& f, const ClassifierConfig& c) {
                        if (std::abs(f.model.p - p) > 1e-12 || f.model.n != n) return na();
                        if (auto m = absent(f, {"E", "M"}); !m.empty()) return missing(m);
                        return cond(f, Ctx{f, c});
                    }};
    };
    std::vector<Rule> rules;
    rules.push_back(make("R7.cubic1", 2.0, 1, [](const InvariantFacts& f, const Ctx& x) {
        const double e = f.model.epsilon;
        const double v = e * (*f.E - e / 2.0 * *f.M);
        return decide(v < 0.0 || x.zero(v), "eps*(E_nz - (eps/2) M_nz) = " + num(v) + " <= 0");
    }));
    rules.push_back(make("R7.cubic2", 2.0, 2, [](const InvariantFacts& f, const Ctx& x) {
        return decide(!x.zero(*f.E), "E_nz = " + num(*f.E) + " != 0");
    }));
    rules.push_back(make("R7.quintic1", 4.0, 1, [](const InvariantFacts& f, const Ctx& x) {
        const double v = f.model.epsilon * *f.E;
        return decide(x.pos(v), "eps*E_nz = " + num(v) + " > 0");
    }));
    rules.push_back(make("R7.quintic2", 4.0, 2, [](const InvariantFacts& f, const Ctx& x) {
        const double e = f.model.epsilon;
        const double v = e * (*f.E + e * *f.M);
        return decide(v > 0.0 || x.zero(v), "eps*(E_nz + eps M_nz) = " + num(v) + " >= 0");
    }));
    return rules;
}

// Cubic-quintic -------------------------------------------------------------------

inline std::vector<Rule> cubic_quintic_rules() {
    std::vector<Rule> rules;
    rules.push_back({"R2", [](const InvariantFacts& f, const ClassifierConfig& c) {
                         if (auto m = absent(f, {"P"}); !m.empty()) return missing(m);
                         return decide(!Ctx{f, c}.zero(*f.P), "P = " + num(*f.P) + " != 0");
                     }});
    auto make = [](std::string id, int n, std::initializer_list<const char*> needs, auto cond) {
        std::vector<const char*> req(needs);
        return Rule{id, [=](const InvariantFacts& f, const ClassifierConfig& c) {
                        if (f.model.n != n) return na();
                        std::vector<std::string> miss;
                        for (const char* r : req)
                            if (!absent(f, {r}).empty()) miss.emplace_back(r);
                        if (!miss.empty()) return missing(miss);
                        const Ctx x{f, c};
                        if (!x.zero(*f.P)) return decide(false, "P = 0 not met");
                        return cond(f, x);
                    }};
    };
    rules.push_back(make("R8.n1", 1, {"P", "E"}, [](const InvariantFacts& f, const Ctx& x) {
        const double v = f.model.lambda1 * *f.E;
        return decide(v < 0.0 || x.zero(v), "lambda1*E1 = " + num(v) + " <= 0");
    }));
    rules.push_back(make("R8.n2", 2, {"P", "E"}, [](const InvariantFacts& f, const Ctx& x) {
        const double v = f.model.lambda2 * *f.E;
        return decide(v < 0.0 || x.zero(v), "lambda2*E1 = " + num(v) + " <= 0");
    }));
    rules.push_back(make("R8.n3a", 3, {"P", "E", "M"}, [](const InvariantFacts& f, const Ctx& x) {
        const double l1 = f.model.lambda1, l2 = f.model.lambda2;
        const double bound = 3.0 * l1 * l1 / (128.0 * std::abs(l2)) * *f.M;
        return decide(l1 < 0.0 && *f.E > bound && !x.zero(*f.E - bound),
                      "lambda1 = " + num(l1) + " < 0, E1 = " + num(*f.E) + " > 3 lambda1^2/(128|lambda2|) M = " +
                          num(bound));
    }));
    rules.push_back(make("R8.n3b", 3, {"P", "E", "P_tilde0"}, [](const InvariantFacts& f, const Ctx& x) {
        const double l1 = f.model.lambda1;
        return decide(l1 > 0.0 && x.neg(*f.E) && x.pos(*f.P_tilde0),
                      "lambda1 = " + num(l1) + " > 0, E1 = " + num(*f.E) + " < 0, P~(0) = " + num(*f.P_tilde0) +
                          " > 0");
    }));
    return rules;
}

// Biharmonic, derivative NLS, log-NLS ----------------------------------------------

inline std::vector<Rule> biharmonic_rules() {
    std::vector<Rule> rules;
    rules.push_back({"R9.a", [](const InvariantFacts& f, const ClassifierConfig&) {
                         if (f.model.epsilon != 1 || f.model.mu < 0.0) return na();
                         return decide(true, "eps = +1, mu = " + num(f.model.mu) + " >= 0");
                     }});
    rules.push_back({"R9.b", [](const InvariantFacts& f, const ClassifierConfig& c) {
                         if (f.model.epsilon != -1 || f.model.mu > 0.0) return na();
                         if (auto m = absent(f, {"E"}); !m.empty()) return missing(m);
                         const Ctx x{f, c};
                         return decide(*f.E > 0.0 || x.zero(*f.E),
                                       "eps = -1, mu = " + num(f.model.mu) + " <= 0, E2 = " + num(*f.E) + " >= 0");
                     }});
    return rules;
}

inline std::vector<Rule> dnls_rules() {
    std::vector<Rule> rules;
    rules.push_back({"R10.a", [](const InvariantFacts& f, const ClassifierConfig& c) {
                         if (f.model.epsilon != -1) return na();
                         if (auto m = absent(f, {"H"}); !m.empty()) return missing(m);
                         return decide(*f.H < 0.0 || Ctx{f, c}.zero(*f.H), "eps = -1, H = " + num(*f.H) + " <= 0");
                     }});
    rules.push_back({"R10.b", [](const InvariantFacts& f, const ClassifierConfig& c) {
                         if (f.model.epsilon != 1) return na();
                         if (auto m = absent(f, {"H"}); !m.empty()) return missing(m);
                         return decide(*f.H > 0.0 || Ctx{f, c}.zero(*f.H), "eps = +1, H = " + num(*f.H) + " >= 0");
                     }});
    rules.push_back({"R10.parity", [](const InvariantFacts& f, const ClassifierConfig&) {
                         if (auto m = absent(f, {"parity"}); !m.empty()) return missing(m);
                         return decide(*f.parity != Parity::None,
                                       std::string("total symmetry: ") + to_string(*f.parity));
                     }});
    return rules;
}

inline std::vector<Rule> log_rules() {
    return {{"R11", [](const InvariantFacts& f, const ClassifierConfig&) {
                 if (f.model.epsilon != 1) return na();
                 return decide(true, "eps = +1");
             }}};
}

inline void check_consistency(const InvariantFacts& f) {
    f.model.validate();
    const bool dnls = is(f, Family::DerivativeNLS);
    if (f.H && !dnls) throw ParameterError("inconsistent facts: H is a derivative-NLS invariant");
    if (f.parity && !dnls) throw ParameterError("inconsistent facts: parity rule applies to derivative NLS only");
    if (dnls && f.E) throw ParameterError("inconsistent facts: derivative NLS uses H, not E");
    if (f.M && *f.M < 0.0 && !is(f, Family::GrossPitaevskii)) throw ParameterError("inconsistent facts: M < 0");
}

/// The regime left open when nothing fires.
inline std::string surviving_regime(const InvariantFacts& f) {
    switch (f.model.family) {
    case Family::PowerNLS:
        switch (criticality(f.model)) {
        case Criticality::Sub: return "P = 0, E < 0 and p < 4/n (surviving regime 1)";
        case Criticality::Critical: return "P = 0, E = 0 and p = 4/n (surviving regime 2)";
        case Criticality::Super: return "P = 0, E > 0 and 4/n < p < p* (surviving regime 3)";
        }
        break;
    case Family::GrossPitaevskii:
        if ((f.model.p == 2.0 || f.model.p == 4.0) && f.model.n <= 2) return "outside the nonzero-background sign conditions";
        return "no nonexistence result for this (p, n)";
    default: break;
    }
    return "outside the family's nonexistence conditions";
}

} // namespace detail

/// Rules for the model's family, in precedence order.
inline std::vector<Rule> rules_for(const ModelSpec& m) {
    switch (m.family) {
    case Family::PowerNLS: return detail::power_rules();
    case Family::GrossPitaevskii: return detail::gp_rules();
    case Family::CubicQuintic: return detail::cubic_quintic_rules();
    case Family::Biharmonic: return detail::biharmonic_rules();
    case Family::DerivativeNLS: return detail::dnls_rules();
    case Family::LogNLS: return detail::log_rules();
    }
    return {};
}

inline std::map<std::string, double> fact_inputs(const InvariantFacts& f) {
    std::map<std::string, double> in;
    auto put = [&](const char* k, const std::optional<double>& v) {
        if (v) in[k] = *v;
    };
    put("P", f.P);
    put("E", f.E);
    put("M", f.M);
    put("P_tilde0", f.P_tilde0);
    put("l2_norm", f.l2_norm);
    put("grad_l2_at_0", f.grad_l2_at_0);
    put("H", f.H);
    in["epsilon"] = f.model.epsilon;
    in["p"] = f.model.p;
    in["n"] = f.model.n;
    return in;
}

/// First rule that holds wins; rules lacking inputs make the verdict
/// Inconclusive unless a later rule holds.
inline RegimeVerdict evaluate_rules(const std::vector<Rule>& rules, const InvariantFacts& facts,
                                    const ClassifierConfig& cfg) {
    detail::check_consistency(facts);
    RegimeVerdict v;
    v.inputs = fact_inputs(facts);
    std::optional<std::pair<std::string, RuleResult>> first_missing;
    for (const auto& rule : rules) {
        const RuleResult r = rule.eval(facts, cfg);
        if (r.outcome == RuleOutcome::Holds) {
            v.status = VerdictStatus::Precluded;
            v.rule = rule.id;
            v.inequality = r.inequality;
            v.table_row = r.table_row;
            return v;
        }
        if (r.outcome == RuleOutcome::Missing && !first_missing) first_missing.emplace(rule.id, r);
    }
    if (first_missing) {
        v.status = VerdictStatus::Inconclusive;
        v.rule = first_missing->first;
        std::string names;
        for (const auto& n : first_missing->second.missing) names += (names.empty() ? "" : ", ") + n;
        v.inequality = "missing input: " + names;
        v.regime = "rule " + first_missing->first + " could not be evaluated";
        return v;
    }
    v.status = VerdictStatus::NotPrecluded;
    v.rule = "none";
    v.regime = detail::surviving_regime(facts);
    return v;
}

inline RegimeVerdict classify(const InvariantFacts& facts, const ClassifierConfig& cfg = {}) {
    return evaluate_rules(rules_for(facts.model), facts, cfg);
}

// --- table rows -----------------------------------------------------------------------

struct TableRow {
    std::string row;
    std::string rule_family;
    std::string conditions;
};

/// Every row of the three power-NLS summary tables.
inline const std::vector<TableRow>& table_rows() {
    static const std::vector<TableRow> rows{
        {"T1.1", "R1", "0 < p < 4/n, eps = 1"},
        {"T1.2", "R2", "0 < p < 4/n, eps = -1, P != 0"},
        {"T1.3", "R3", "0 < p < 4/n, eps = -1, P = 0, E >= 0"},
        {"T1.4", "R6", "n = 1, 2 <= p < 4, eps = -1, P = 0, E < 0, small mass with fast decay"},
        {"T2.1", "R1", "p = 4/n, eps = 1"},
        {"T2.2", "R2", "p = 4/n, eps = -1, P != 0"},
        {"T2.3", "R3", "p = 4/n, eps = -1, E != 0"},
        {"T2.4", "R4", "p = 4/n, eps = -1, P = 0, E = 0, M < M[Q]"},
        {"T2.5", "R4", "p = 4/n, eps = -1, P = 0, E = 0, P~(0) != 0"},
        {"T3.1", "R1", "4/n < p < p*, eps = 1"},
        {"T3.2", "R2", "4/n < p < p*, eps = -1, P != 0"},
        {"T3.3", "R3", "4/n < p < p*, eps = -1, E <= 0"},
        {"T3.4", "R5", "4/n < p < p*, eps = -1, P = 0, E > 0, mass-energy balance below Q*"},
    };
    return rows;
}

// --- fact extraction ----------------------------------------------------------------------

inline Parity detect_parity(const Field1D& f, double tol = 1e-10) {
    const int n = f.size();
    double peak = 0.0, even = 0.0, odd = 0.0;
    for (int j = 0; j < n; ++j) {
        const cplx a = f[j], b = f[(n - j) % n];
        peak = std::max(peak, std::abs(a));
        even = std::max(even, std::abs(a - b));
        odd = std::max(odd, std::abs(a + b));
    }
    if (peak == 0.0) return Parity::Even;
    if (even <= tol * peak) return Parity::Even;
    if (odd <= tol * peak) return Parity::Odd;
    return Parity::None;
}

/// Facts measured on a single field. A Stokes field paired with a power
/// model is classified under the matching Gross-Pitaevskii model.
inline InvariantFacts facts_from_field(const Field1D& f, const ModelSpec& model, NonzeroOptions opt = {}) {
    InvariantFacts facts;
    facts.model = model;
    if (f.background() == BackgroundKind::Stokes) {
        if (model.family == Family::PowerNLS)
            facts.model = ModelSpec::gross_pitaevskii(model.epsilon, model.p, model.n);
        else if (model.family != Family::GrossPitaevskii)
            throw ParameterError("facts_from_field: Stokes fields need a power or Gross-Pitaevskii model");
        const auto r = invariants_nonzero_bc(f, facts.model, opt);
        facts.P = r.p_nz;
        facts.E = r.e_gp;
        facts.M = r.m_nz;
        return facts;
    }
    const auto r = invariants_zero_bc(f, model);
    facts.P = r.p;
    facts.M = r.m;
    facts.l2_norm = std::sqrt(*r.m);
    facts.grad_l2_at_0 = std::sqrt(gradient_sq(f));
    if (model.family == Family::DerivativeNLS) {
        facts.H = r.dnls_h;
        facts.parity = detect_parity(f);
    } else {
        facts.E = r.e;
        facts.P_tilde0 = r.p_tilde;
    }
    return facts;
}

/// Conserved series whose drift gates classification.
inline std::vector<std::string> conserved_keys(const ModelSpec& m) {
    switch (m.family) {
    case Family::GrossPitaevskii: return {"m_nz", "e_gp", "p_nz"};
    case Family::DerivativeNLS: return {"m", "dnls_h", "p"};
    default: return {"m", "e", "p"};
    }
}

/// Facts from time averages of the conserved series and the initial sample.
inline RegimeVerdict classify_trajectory(const TrajectoryDiagnostics& traj, const ModelSpec& model,
                                         const ClassifierConfig& cfg = {}) {
    if (traj.reports.empty()) throw ParameterError("classify_trajectory: empty trajectory");
    RegimeVerdict bad;
    bad.status = VerdictStatus::Inconclusive;
    bad.rule = "drift";
    if (traj.reports.size() >= 2) {
        for (const auto& key : conserved_keys(model)) {
            const double d = conservation_drift(traj, key);
            if (!(d <= cfg.drift_limit)) {
                bad.inequality = "drift(" + key + ") = " + detail::num(d) + " > " + detail::num(cfg.drift_limit);
                bad.regime = "conserved quantities drift too much to classify";
                bad.monotone_fraction = traj.monotone_fraction;
                bad.blowup_time = traj.blowup_time;
                return bad;
            }
        }
    }
    auto mean = [&](const std::string& key) {
        double s = 0.0;
        for (const auto& r : traj.reports) s += *r.get(key);
        return s / static_cast<double>(traj.reports.size());
    };
    const auto keys = conserved_keys(model);
    InvariantFacts f;
    f.model = model;
    f.M = mean(keys[0]);
    f.P = mean(keys[2]);
    if (model.family == Family::DerivativeNLS)
        f.H = mean(keys[1]);
    else
        f.E = mean(keys[1]);
    if (model.family != Family::GrossPitaevskii) {
        f.l2_norm = std::sqrt(*f.M);
        if (traj.virial_name == "p_tilde" && std::isfinite(traj.virial.front())) f.P_tilde0 = traj.virial.front();
        if (traj.initial_field) {
            f.grad_l2_at_0 = std::sqrt(gradient_sq(*traj.initial_field));
            if (model.family == Family::DerivativeNLS) f.parity = detect_parity(*traj.initial_field);
        }
    }
    auto v = classify(f, cfg);
    v.monotone_fraction = traj.monotone_fraction;
    v.blowup_time = traj.blowup_time;
    return v;
}

} // namespace nlslab
