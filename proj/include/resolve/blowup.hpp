#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "resolve/chart.hpp"

namespace resolve {

/// Generator num/den of a center; den is a unit on the chart (usually 1).
struct CenterGenerator {
  Polynomial num;
  Polynomial den;
  std::string fresh;  // name of num/(den * scaling) on the blow-up
};

/// One center on one chart. The first generator is the chart's P variable.
struct CenterSpec {
  std::string chart;
  std::string label;
  std::string scaling;
  std::vector<CenterGenerator> generators;
  // Renaming of the coordinates the blow-up leaves untouched.
  std::map<std::string, std::string> rename;
  // Extra single-generator exclusions imposed on the child (open subsets).
  std::vector<Polynomial> restrict;

  std::vector<Polynomial> ideal_generators() const {
    std::vector<Polynomial> out;
    for (auto& g : generators) out.push_back(g.num);
    return out;
  }
};

inline std::optional<std::size_t> as_variable(const Polynomial& f) {
  if (f.terms().size() != 1 || f.terms()[0].coef != 1 || f.terms()[0].mono.degree() != 1) return std::nullopt;
  auto s = f.support();
  return s.front();
}

namespace detail {

inline std::pair<Polynomial, unsigned> strip_power(const Polynomial& f, std::size_t v) {
  if (f.is_zero()) return {f, 0};
  unsigned k = f.monomial_content()[v];
  return {f.divide_monomial(Monomial::variable(f.registry()->size(), v, k)), k};
}

// Removes monomial factors that are units on the chart (variables excluded
// by a single-generator exclusion).
inline Polynomial strip_unit_factors(const Polynomial& f, const std::vector<std::size_t>& unit_vars) {
  Polynomial g = f;
  for (auto v : unit_vars) g = strip_power(g, v).first;
  return g;
}

inline std::set<std::string> normal_set(const std::vector<Polynomial>& gens, const Registry& reg) {
  std::set<std::string> s;
  for (auto& g : gens) s.insert(g.embed(reg).primitive().to_string());
  return s;
}

// Drops empty exclusions (a nonzero constant among the generators), exact
// duplicates, and exclusions whose zero set lies in another one by
// generator inclusion.
inline std::vector<std::vector<Polynomial>> prune_exclusions(const std::vector<std::vector<Polynomial>>& in,
                                                              const Registry& reg) {
  std::vector<std::set<std::string>> keys;
  for (auto& e : in) keys.push_back(normal_set(e, reg));
  std::vector<std::vector<Polynomial>> out;
  for (std::size_t i = 0; i < in.size(); ++i) {
    bool drop = std::any_of(in[i].begin(), in[i].end(), [](const Polynomial& g) { return g.is_constant() && !g.is_zero(); });
    for (std::size_t j = 0; j < in.size() && !drop; ++j) {
      if (i == j) continue;
      bool sub = std::includes(keys[i].begin(), keys[i].end(), keys[j].begin(), keys[j].end());
      if (sub && (keys[i] != keys[j] || j < i)) drop = true;
    }
    if (!drop) out.push_back(in[i]);
  }
  return out;
}

}  // namespace detail

/// Blow-up of chart `c` along `s`, presented as a chart with one more
/// torus factor. Variable generators x become Lambda*x'; other generators
/// h get a fresh coordinate with equation Lambda*h'*den - num.
inline ChartPresentation blowup_step(const ChartPresentation& c, const CenterSpec& s, const std::string& child_name) {
  if (s.generators.empty()) throw std::invalid_argument("empty center");
  for (auto& g : s.generators)
    if (!same_registry(g.num.registry(), c.reg) || !same_registry(g.den.registry(), c.reg))
      throw RegistryMismatch("center generators are not over chart " + c.name);
  if (s.generators[0].num != c.var(c.p_variable()) || s.generators[0].den != Polynomial::constant(c.reg, 1))
    throw std::invalid_argument("first center generator must be the P variable " + c.p_variable() + " of " + c.name);

  const std::size_t n = c.reg->size();
  std::vector<std::optional<std::size_t>> gen_var;
  std::vector<bool> is_gen_var(n, false);
  for (auto& g : s.generators) {
    auto v = g.den == Polynomial::constant(c.reg, 1) ? as_variable(g.num) : std::nullopt;
    gen_var.push_back(v);
    if (v) is_gen_var[*v] = true;
  }
  auto renamed = [&](const std::string& x) {
    auto it = s.rename.find(x);
    return it == s.rename.end() ? x : it->second;
  };
  auto scal = c.scaling();
  std::vector<std::string> names;
  for (auto& x : scal) names.push_back(renamed(x));
  names.push_back(s.scaling);
  for (auto& g : s.generators) names.push_back(g.fresh);
  for (std::size_t v = 0; v < n; ++v) {
    const std::string& x = c.reg->name(v);
    if (is_gen_var[v] || std::find(scal.begin(), scal.end(), x) != scal.end()) continue;
    names.push_back(renamed(x));
  }
  ChartPresentation out;
  out.name = child_name;
  out.parent = c.name;
  out.torus_rank = c.torus_rank + 1;
  try {
    out.reg = make_registry(names);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("name collision in blow-up of ") + c.name + ": " + e.what());
  }
  out.ambient_dimension = static_cast<int>(out.reg->size());
  const std::size_t lam = out.reg->index(s.scaling);
  const Polynomial L = out.var(s.scaling);

  std::map<std::string, Polynomial> sigma;
  for (std::size_t v = 0; v < n; ++v) {
    const std::string& x = c.reg->name(v);
    if (!is_gen_var[v]) sigma.emplace(x, out.var(renamed(x)));
  }
  for (std::size_t i = 0; i < s.generators.size(); ++i)
    if (gen_var[i]) sigma.insert_or_assign(c.reg->name(*gen_var[i]), L * out.var(s.generators[i].fresh));

  // Weights: old ones padded, Lambda = -e_new, fresh = weight(h) + e_new.
  const std::size_t r = static_cast<std::size_t>(out.torus_rank);
  out.weights.assign(out.reg->size(), Weight(r, 0));
  for (std::size_t v = 0; v < n; ++v) {
    const std::string& x = c.reg->name(v);
    if (is_gen_var[v]) continue;
    Weight w = c.weights[v];
    w.resize(r, 0);
    out.weights[out.reg->index(renamed(x))] = w;
  }
  out.weights[lam][r - 1] = -1;
  for (auto& g : s.generators) {
    auto wn = c.homogeneous_weight(g.num), wd = c.homogeneous_weight(g.den);
    if (!wn || !wd) throw std::invalid_argument("center generator " + g.num.to_string() + " is not torus-homogeneous");
    Weight w(r, 0);
    for (std::size_t k = 0; k + 1 < r; ++k) w[k] = (*wn)[k] - (*wd)[k];
    w[r - 1] = 1;
    out.weights[out.reg->index(g.fresh)] = w;
  }

  for (auto& x : scal) out.monomial.push_back(renamed(x));
  out.monomial.push_back(s.scaling);
  out.monomial.push_back(s.generators[0].fresh);

  // Strict transforms of the old equations, then the fresh relations.
  for (std::size_t i = 0; i < c.equations.size(); ++i) {
    out.equations.push_back(detail::strip_power(c.equations[i].substitute(sigma, out.reg), lam).first);
    out.equation_labels.push_back(i < c.equation_labels.size() ? c.equation_labels[i] : "");
  }
  for (std::size_t i = 0; i < s.generators.size(); ++i) {
    if (gen_var[i]) continue;
    auto& g = s.generators[i];
    out.equations.push_back(L * out.var(g.fresh) * g.den.substitute(sigma, out.reg) - g.num.substitute(sigma, out.reg));
    out.equation_labels.push_back("E" + std::to_string(out.equations.size()));
  }

  // Exclusions.
  std::vector<Polynomial> fresh;
  for (auto& g : s.generators) fresh.push_back(out.var(g.fresh));
  std::vector<std::vector<Polynomial>> restrict;
  for (auto& u : s.restrict) restrict.push_back({u.substitute(sigma, out.reg)});
  std::vector<std::size_t> unit_vars;
  auto note_units = [&](const std::vector<std::vector<Polynomial>>& ex) {
    for (auto& e : ex)
      if (e.size() == 1)
        if (auto v = as_variable(e[0])) unit_vars.push_back(*v);
  };
  note_units(restrict);
  std::vector<std::vector<Polynomial>> carried;
  std::vector<std::vector<Polynomial>> stripped_forms;
  std::vector<std::vector<Polynomial>> unfactored;
  std::vector<std::size_t> lambda_count;
  for (auto& ex : c.excluded) {
    std::vector<Polynomial> prod, stripped, keep;
    std::size_t count = 0;
    for (auto& g : ex) {
      Polynomial img = g.substitute(sigma, out.reg);
      auto [q, k] = detail::strip_power(img, lam);
      prod.push_back(img);
      stripped.push_back(q);
      if (k)
        ++count;
      else
        keep.push_back(img);
    }
    carried.push_back(prod);
    stripped_forms.push_back(stripped);
    unfactored.push_back(keep);
    lambda_count.push_back(count);
  }
  note_units(carried);
  for (auto& ex : carried)
    if (ex.size() > 1)
      for (auto& g : ex) g = detail::strip_unit_factors(g, unit_vars);

  auto current = [&](std::size_t skip) {
    std::vector<std::vector<Polynomial>> all;
    for (std::size_t j = 0; j < carried.size(); ++j)
      if (j != skip) all.push_back(carried[j]);
    for (auto& e : restrict) all.push_back(e);
    all.push_back(fresh);
    return all;
  };
  for (std::size_t j = 0; j < carried.size(); ++j) {
    if (lambda_count[j] < 2) continue;
    // The component of V(exclusion) off the exceptional divisor must
    // already be excluded for (Lambda, unfactored) to be equivalent.
    Locus l{out.reg, out.equations, out.equation_labels, current(j), {L}};
    for (auto& q : stripped_forms[j]) {
      l.equations.push_back(q);
      l.labels.push_back("strict component");
    }
    auto proof = prove_empty(l);
    if (proof && proof->verify()) {
      std::vector<Polynomial> repl{L};
      for (auto& k : unfactored[j]) repl.push_back(detail::strip_unit_factors(k, unit_vars));
      carried[j] = repl;
    }
  }
  auto all = carried;
  for (auto& e : restrict) all.push_back(e);
  all.push_back(fresh);
  out.excluded = detail::prune_exclusions(all, out.reg);

  for (std::size_t v = 0; v < n; ++v) {
    const std::string& x = c.reg->name(v);
    const Polynomial& img = sigma.at(x);
    if (out.reg->contains(x) && img == out.var(x)) continue;
    out.substitution.push_back({x, img});
  }
  return out;
}

/// Structural comparison of two presentations of the same chart, with a
/// semantic fallback (equal ideals, equal excluded sets).
inline CheckReport compare(const ChartPresentation& a, const ChartPresentation& b) {
  CheckReport r;
  std::set<std::string> na(a.reg->names().begin(), a.reg->names().end());
  std::set<std::string> nb(b.reg->names().begin(), b.reg->names().end());
  if (na != nb) {
    std::string d;
    for (auto& x : na)
      if (!nb.count(x)) d += " -" + x;
    for (auto& x : nb)
      if (!na.count(x)) d += " +" + x;
    r.fail("coordinates differ:" + d);
    return r;
  }
  if (a.torus_rank != b.torus_rank) {
    r.fail("torus ranks differ");
    return r;
  }
  if (a.p_variable() != b.p_variable()) r.fail("P variables differ: " + a.p_variable() + " vs " + b.p_variable());
  auto sa = a.scaling(), sb = b.scaling();
  if (std::set<std::string>(sa.begin(), sa.end()) != std::set<std::string>(sb.begin(), sb.end()))
    r.fail("scaling variables differ");
  if (!r.ok) return r;

  // Torus factors are matched through the scaling variable of weight -e_k.
  const std::size_t rank = static_cast<std::size_t>(a.torus_rank);
  auto factor_of = [&](const ChartPresentation& c, const std::string& x) -> std::optional<std::size_t> {
    const Weight& w = c.weights[c.reg->index(x)];
    std::optional<std::size_t> k;
    for (std::size_t i = 0; i < rank; ++i) {
      if (w[i] == -1 && !k) k = i;
      else if (w[i] != 0) return std::nullopt;
    }
    return k;
  };
  std::vector<std::size_t> perm(rank, rank);
  for (auto& x : sa) {
    auto ka = factor_of(a, x), kb = factor_of(b, x);
    if (ka && kb) perm[*ka] = *kb;
  }
  if (std::count(perm.begin(), perm.end(), rank) && rank == sa.size()) r.fail("torus factors cannot be matched");
  for (std::size_t i = 0; i < rank; ++i)
    if (perm[i] == rank) perm[i] = i;
  for (auto& x : na) {
    const Weight& wa = a.weights[a.reg->index(x)];
    const Weight& wb = b.weights[b.reg->index(x)];
    for (std::size_t i = 0; i < rank; ++i)
      if (wa[i] != wb[perm[i]]) {
        r.fail("weight of " + x + " differs: " + weight_string(wa) + " vs " + weight_string(wb));
        break;
      }
  }
  if (!r.ok) return r;

  auto eq_a = detail::normal_set(a.equations, a.reg);
  auto eq_b = detail::normal_set(b.equations, a.reg);
  std::set<std::set<std::string>> ex_a, ex_b;
  for (auto& e : a.excluded) ex_a.insert(detail::normal_set(e, a.reg));
  for (auto& e : b.excluded) ex_b.insert(detail::normal_set(e, a.reg));
  if (eq_a == eq_b && ex_a == ex_b) {
    r.notes.push_back("syntactic match");
    return r;
  }
  r.notes.push_back("no syntactic match; comparing ideals and excluded sets");

  ChartPresentation bb = b;
  bb.reg = a.reg;
  for (auto& e : bb.equations) e = e.embed(a.reg);
  for (auto& ex : bb.excluded)
    for (auto& g : ex) g = g.embed(a.reg);
  auto one_way = [&](const ChartPresentation& x, const ChartPresentation& y, const std::string& tag) {
    for (auto& e : x.equations) {
      auto m = chart_ideal_contains(y, e);
      if (!m.member) r.fail(tag + ": equation " + e.to_string() + " not in the other ideal, residual " + m.residual.to_string());
    }
    for (auto& ex : x.excluded) {
      auto p = prove_empty(restricted_locus(y, ex, "exclusion"));
      std::string s;
      for (auto& g : ex) s += (s.empty() ? "" : ", ") + g.to_string();
      if (!p || !p->verify()) r.fail(tag + ": excluded set (" + s + ") is not excluded by the other presentation");
    }
  };
  one_way(a, bb, "left");
  one_way(bb, a, "right");
  if (r.ok) r.notes.push_back("semantic match");
  return r;
}

// ---------------------------------------------------------------------------
// Construction steps as data

struct CenterData {
  std::string label;
  std::string scaling;
  std::vector<std::tuple<std::string, std::string, std::string>> generators;  // num, den, fresh
  std::map<std::string, std::string> rename;
  std::vector<std::string> restrict;
};

/// One construction step: the centers as subschemes of the parent chart,
/// and one or more orders in which to replay them as single blow-ups.
struct StepCenter {
  std::string label;
  std::vector<std::string> generators;  // on the parent chart
  std::vector<std::string> restrict;    // the step only concerns the open where these are units
};

struct StepData {
  int step = 0;
  std::string parent, child;
  std::vector<StepCenter> centers;
  std::vector<std::vector<CenterData>> replays;
};

inline CenterSpec realize(const ChartPresentation& c, const CenterData& d) {
  CenterSpec s;
  s.chart = c.name;
  s.label = d.label;
  s.scaling = d.scaling;
  s.rename = d.rename;
  for (auto& [num, den, fresh] : d.generators) s.generators.push_back({c.parse(num), c.parse(den), fresh});
  for (auto& u : d.restrict) s.restrict.push_back(c.parse(u));
  return s;
}

inline std::vector<StepData> load_steps(const std::filesystem::path& file = data_dir() / "centers.json") {
  auto j = read_json_file(file);
  std::vector<StepData> out;
  try {
    for (auto& st : j.at("steps")) {
      StepData s;
      s.step = st.at("step").get<int>();
      s.parent = st.at("parent").get<std::string>();
      s.child = st.at("child").get<std::string>();
      for (auto& c : st.at("centers"))
        s.centers.push_back({c.at("label").get<std::string>(), c.at("generators").get<std::vector<std::string>>(),
                             c.value("restrict", std::vector<std::string>{})});
      for (auto& seq : st.at("replays")) {
        std::vector<CenterData> chain;
        for (auto& c : seq) {
          CenterData d;
          d.label = c.at("label").get<std::string>();
          d.scaling = c.at("scaling").get<std::string>();
          for (auto& g : c.at("generators"))
            d.generators.emplace_back(g.at("expr").get<std::string>(), g.value("den", std::string("1")),
                                      g.at("fresh").get<std::string>());
          d.rename = c.value("rename", std::map<std::string, std::string>{});
          d.restrict = c.value("restrict", std::vector<std::string>{});
          chain.push_back(std::move(d));
        }
        s.replays.push_back(std::move(chain));
      }
      out.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(file.string() + ": " + e.what());
  }
  return out;
}

/// The parent chart cut down to the open set a center lives on.
inline ChartPresentation center_chart(const ChartPresentation& parent, const StepCenter& center) {
  ChartPresentation c = parent;
  for (auto& u : center.restrict) c.excluded.push_back({c.parse(u)});
  return c;
}

inline std::vector<Polynomial> center_generators(const ChartPresentation& parent, const StepCenter& center) {
  std::vector<Polynomial> out;
  for (auto& g : center.generators) out.push_back(parent.parse(g));
  return out;
}

inline const StepData& find_step(const std::vector<StepData>& steps, int k) {
  for (auto& s : steps)
    if (s.step == k) return s;
  throw DataError("no construction step " + std::to_string(k));
}

struct ReplayResult {
  CheckReport report;
  bool ok() const { return report.ok; }
  std::vector<ChartPresentation> produced;  // final chart of each replay order
};

/// Replays every order of a step with blowup_step and compares each result
/// with the shipped child chart, and the orders with each other.
inline ReplayResult replay_step(const Tower& t, const StepData& s) {
  ReplayResult out;
  const ChartPresentation& shipped = t.at(s.child);
  for (std::size_t k = 0; k < s.replays.size(); ++k) {
    ChartPresentation cur = t.at(s.parent);
    const auto& chain = s.replays[k];
    for (std::size_t i = 0; i < chain.size(); ++i) {
      std::string name = i + 1 == chain.size() ? s.child : s.child + "_" + chain[i].label;
      cur = blowup_step(cur, realize(cur, chain[i]), name);
      if (auto v = validate(cur); !v.ok)
        for (auto& msg : v.issues) out.report.fail("order " + std::to_string(k + 1) + ": " + msg);
    }
    auto cmp = compare(cur, shipped);
    std::string tag = "order " + std::to_string(k + 1) + " vs shipped " + s.child + ": ";
    for (auto& msg : cmp.issues) out.report.fail(tag + msg);
    for (auto& msg : cmp.notes) out.report.notes.push_back(tag + msg);
    out.produced.push_back(std::move(cur));
  }
  for (std::size_t k = 1; k < out.produced.size(); ++k) {
    auto cmp = compare(out.produced[0], out.produced[k]);
    std::string tag = "order 1 vs order " + std::to_string(k + 1) + ": ";
    for (auto& msg : cmp.issues) out.report.fail(tag + msg);
    for (auto& msg : cmp.notes) out.report.notes.push_back(tag + msg);
  }
  return out;
}

}  // namespace resolve
