#pragma once

// The eight acceptance criteria as independent, deterministic checks. Both
// the CLI verb and the acceptance test binary print one line per criterion.

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "twistbench/coset_enum.hpp"
#include "twistbench/free_product.hpp"
#include "twistbench/graph_core.hpp"
#include "twistbench/matrix_lab.hpp"
#include "twistbench/product_lattice.hpp"
#include "twistbench/raag_words.hpp"
#include "twistbench/random_inputs.hpp"
#include "twistbench/splitting_shortener.hpp"
#include "twistbench/twist_forge.hpp"

namespace twistbench::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
  double time_limit = 0;
};

inline std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "criterion " << r.id << " [" << (r.pass ? "PASS" : "FAIL") << "] " << r.name << ": " << r.detail << " ("
     << r.seconds << " s, limit " << r.time_limit << " s)";
  return os.str();
}

namespace detail {

template <class F>
CriterionResult timed(int id, std::string name, double limit, F&& body) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  r.time_limit = limit;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail += std::string(" exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.seconds > limit) {
    r.pass = false;
    r.detail += " (time limit exceeded)";
  }
  return r;
}

/// Conjugates of u reachable by single-letter conjugations within `depth`
/// steps, never exceeding u's length.
inline std::vector<NormalWord> conjugacy_ball(const NormalWord& u, std::size_t depth) {
  const GraphPtr& gp = u.graph_ptr();
  std::set<NormalWord> seen{u};
  std::vector<NormalWord> frontier{u};
  for (std::size_t d = 0; d < depth && !frontier.empty(); ++d) {
    std::vector<NormalWord> next;
    for (const auto& w : frontier)
      for (Vertex v = 0; v < gp->size(); ++v)
        for (int s : {1, -1}) {
          NormalWord c = conjugate(w, NormalWord::generator(gp, v, s));
          if (c.length() <= u.length() && seen.insert(c).second) next.push_back(c);
        }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline CriterionResult sandwich(std::uint64_t seed) {
  return detail::timed(1, "displacement sandwich", 60, [&](CriterionResult& r) {
    std::mt19937_64 rng(seed ^ 0x51);
    std::uniform_int_distribution<std::size_t> nv(1, 6), extra(0, 3);
    std::uniform_real_distribution<double> dens(0.2, 0.8);
    int ok = 0, certified = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
      auto g = inputs::random_graph(nv(rng), dens(rng), rng);
      FiniteSubset omega;
      omega.insert(identity(g));
      std::size_t k = extra(rng);
      for (std::size_t i = 0; i < k; ++i) omega.insert(inputs::random_word(g, 6, rng));
      Displacement disp;
      // Search at least as far as the longest word reaches.
      for (long radius = std::max(1L, std::min(5L, default_radius(omega))); radius <= 7; ++radius) {
        disp = t_displacement(omega, radius);
        if (disp.certified) break;
      }
      auto sq = square_set(omega);
      std::size_t ell = ell_set(sq), tt = disp.value, n = g->size(), card = sq.size();
      bool lower = ell <= 2 * card * tt;
      bool upper = 2 * tt <= 3 * n * ell;
      if (disp.certified) ++certified;
      if (disp.certified && lower && upper) ++ok;
    }
    r.pass = ok == trials;
    r.detail = std::to_string(ok) + "/" + std::to_string(trials) + " instances satisfy both bounds, " +
               std::to_string(certified) + " certified";
  });
}

inline CriterionResult star_equivalence(std::uint64_t) {
  return detail::timed(2, "star SVP equivalence", 300, [&](CriterionResult& r) {
    const std::vector<std::size_t> expected{1, 2, 4, 11, 34, 156};
    std::size_t agree = 0, total = 0;
    bool counts_ok = true;
    std::string counts;
    for (std::size_t n = 1; n <= 6; ++n) {
      auto graphs = inputs::graphs_up_to_isomorphism(n);
      counts += (n > 1 ? "," : "") + std::to_string(graphs.size());
      counts_ok = counts_ok && graphs.size() == expected[n - 1];
      for (const auto& g : graphs) {
        auto svp = svp_closure(*g);
        for (Vertex v = 0; v < n; ++v) {
          VertexSet lk = link(*g, v);
          if (lk.empty()) continue;
          bool in_closure = std::binary_search(svp.begin(), svp.end(), star(*g, v));
          bool criterion = true;
          for (Vertex x = 0; x < n; ++x)
            if (x != v && lk.subset_of(link(*g, x))) criterion = false;
          ++total;
          if (in_closure == criterion) ++agree;
        }
      }
    }
    r.pass = counts_ok && agree == total;
    r.detail = std::to_string(agree) + "/" + std::to_string(total) + " (graph, vertex) cases agree; classes " + counts;
  });
}

inline CriterionResult hyperplanes(std::uint64_t seed) {
  return detail::timed(3, "hyperplane decomposition", 300, [&](CriterionResult& r) {
    std::mt19937_64 rng(seed ^ 0x53);
    std::uniform_int_distribution<std::size_t> nv(2, 5);
    std::uniform_real_distribution<double> dens(0.2, 0.8);
    const int trials = 500;
    int ok = 0;
    for (int t = 0; t < trials; ++t) {
      auto g = inputs::random_graph(nv(rng), dens(rng), rng);
      auto w = inputs::random_word(g, 8, rng);
      std::size_t sum = 0;
      for (Vertex v = 0; v < g->size(); ++v) sum += trans_len_Tv(w, v);
      auto ball = detail::conjugacy_ball(w, 8);
      std::size_t oracle_len = w.length();
      std::vector<std::size_t> oracle_count(g->size());
      for (Vertex v = 0; v < g->size(); ++v) oracle_count[v] = w.count(v);
      for (const auto& c : ball) {
        oracle_len = std::min(oracle_len, c.length());
        for (Vertex v = 0; v < g->size(); ++v) oracle_count[v] = std::min(oracle_count[v], c.count(v));
      }
      bool good = sum == trans_len_X(w) && oracle_len == trans_len_X(w);
      for (Vertex v = 0; v < g->size(); ++v) good = good && oracle_count[v] == trans_len_Tv(w, v);
      if (good) ++ok;
    }
    r.pass = ok == trials;
    r.detail = std::to_string(ok) + "/" + std::to_string(trials) + " words match the decomposition and both oracles";
  });
}

inline std::vector<std::pair<std::string, GraphPtr>> taxonomy_graphs() {
  return {{"path3", inputs::path_graph(3)},   {"path4", inputs::path_graph(4)},
          {"square", inputs::cycle_graph(4)}, {"pentagon", inputs::cycle_graph(5)},
          {"star4", inputs::star_graph(4)},   {"free3", inputs::edgeless_graph(3)},
          {"path4+apex", inputs::path_with_apex()}, {"K2", inputs::complete_graph(2)},
          {"K3", inputs::complete_graph(3)},  {"K4", inputs::complete_graph(4)},
          {"K5", inputs::complete_graph(5)}};
}

inline CriterionResult twist_taxonomy(std::uint64_t) {
  return detail::timed(4, "twist taxonomy", 120, [&](CriterionResult& r) {
    std::size_t generators = 0, classified = 0, clique_centraliser = 0, twists = 0, twists_ok = 0;
    for (const auto& [name, g] : taxonomy_graphs()) {
      bool clique = is_clique(*g, g->all());
      for (const auto& f : ls_generators(g)) {
        ++generators;
        switch (f.tag().kind) {
          case AutKind::Inversion:
            ++classified;
            break;
          case AutKind::Transvection: {
            auto c = classify_transvection(*g, f.tag().v, f.tag().w);
            dt_type(f);
            ++classified;
            if (clique && c.verdict == TwistClass::CentraliserTwist) ++clique_centraliser;
            break;
          }
          case AutKind::PartialConjugation:
            if (dt_type(f).type == DehnType::PartialConjugation) ++classified;
            break;
          default:
            break;
        }
      }
      // HNN twists over every vertex by dominating multipliers, and amalgam
      // twists conjugating a star by its centre.
      for (Vertex v = 0; v < g->size(); ++v) {
        auto hnn = SplittingSpec::hnn(*g, v);
        for (Vertex u = 0; u < g->size(); ++u) {
          if (u == v || !link(*g, v).subset_of(star(*g, u))) continue;
          for (auto form : {TwistForm::HNNLeft, TwistForm::HNNRight}) {
            ++twists;
            auto tw = generic_dehn_twist(g, hnn, form, NormalWord::generator(g, u));
            if (tw.verified() && !tw.check(*tw.inverse_images())) ++twists_ok;
          }
        }
        VertexSet rest = g->all() - star(*g, v);
        if (rest.empty()) continue;
        auto am = SplittingSpec::amalgam(*g, g->all() - VertexSet::of(g->size(), {v}), star(*g, v));
        ++twists;
        auto tw = generic_dehn_twist(g, am, TwistForm::AmalgamConj, NormalWord::generator(g, v));
        if (tw.verified() && !tw.check(*tw.inverse_images())) ++twists_ok;
      }
    }
    r.pass = classified == generators && clique_centraliser == 0 && twists_ok == twists && twists > 0;
    r.detail = std::to_string(classified) + "/" + std::to_string(generators) + " generators classified, " +
               std::to_string(clique_centraliser) + " centraliser transvections on cliques, " +
               std::to_string(twists_ok) + "/" + std::to_string(twists) + " generic twists verified";
  });
}

inline CriterionResult coset_enumeration(std::uint64_t) {
  return detail::timed(5, "coset enumeration", 600, [&](CriterionResult& r) {
    const std::size_t cap = coset_cap_from_env();
    bool ok = true;
    std::string detail;
    auto run = [&](std::size_t n, Int m) {
      auto t0 = std::chrono::steady_clock::now();
      auto v = elem_index_power_case(n, m, cap);
      double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (s > 120) ok = false;
      return v;
    };
    auto one = run(2, 1);
    ok = ok && one.kind == IndexVerdict::Kind::Finite && one.index == 1;
    std::map<Int, std::uint64_t> idx;
    for (Int m = 2; m <= 5; ++m) {
      auto v = run(2, m);
      ok = ok && v.kind == IndexVerdict::Kind::Finite;
      idx[m] = v.index;
      detail += "m=" + std::to_string(m) + ":" + std::to_string(v.index) + " ";
    }
    for (auto [a, ia] : idx)
      for (auto [b, ib] : idx)
        if (b % a == 0 && (ia == 0 || ib % ia != 0)) ok = false;
    auto six = run(2, 6);
    ok = ok && six.kind == IndexVerdict::Kind::InfiniteByCriterion;
    auto rank3 = run(3, 2);
    ok = ok && rank3.kind == IndexVerdict::Kind::Finite;
    detail += "m=6:" + std::string(to_string(six.kind)) + " n=3,m=2:" + to_string(rank3.kind) + "(" +
              std::to_string(rank3.index) + ")";
    r.pass = ok;
    r.detail = detail;
  });
}

inline CriterionResult poison_pipeline(std::uint64_t) {
  return detail::timed(6, "poison pipeline", 900, [&](CriterionResult& r) {
    const std::size_t cap = coset_cap_from_env();
    bool ok = true;
    std::string detail;
    for (Int m = 2; m <= 10; ++m) {
      auto [pair, rep] = poisonous_centre_pipeline(m);
      auto idx = elem_index_power_case(2, m, cap);
      auto want = m <= 5 ? PoisonVerdict::NotPoison : PoisonVerdict::Poison;
      bool consistent = (rep.verdict == PoisonVerdict::NotPoison) == (idx.kind == IndexVerdict::Kind::Finite) &&
                        (rep.verdict == PoisonVerdict::Poison) ==
                            (idx.kind == IndexVerdict::Kind::InfiniteByCriterion);
      ok = ok && rep.verdict == want && consistent;
      detail += std::to_string(m) + ":" + to_string(rep.verdict) + " ";
    }
    r.pass = ok;
    r.detail = detail;
  });
}

inline CriterionResult shortening(std::uint64_t seed) {
  return detail::timed(7, "free product shortening", 600, [&](CriterionResult& r) {
    std::mt19937_64 rng(seed ^ 0x57);
    struct Case {
      std::vector<long> orders;
      int free_rank;
      std::string name;
    };
    const std::vector<Case> cases{{{2, 3}, 0, "Z/2*Z/3"}, {{2, 2}, 1, "Z/2*Z/2*Z"}, {{3}, 1, "Z/3*Z"}};
    const int trials = 50;
    std::string detail;
    bool all = true;
    for (const auto& c : cases) {
      int ok = 0;
      for (int t = 0; t < trials; ++t) {
        FreeProductSpec sp = make_spec(c.orders, c.free_rank);
        // Enlarge some S_i by extra powers, keeping |S| ≤ 5.
        std::size_t size = standard_set(sp).size();
        for (int i = 0; i < sp.factors() && size < 5; ++i)
          if (sp.order(i) > 2 && std::bernoulli_distribution(0.5)(rng)) {
            sp.gen_sets[static_cast<std::size_t>(i)].push_back(fp_gen(sp, i, 2));
            ++size;
          }
        int depth = std::uniform_int_distribution<int>(0, 6)(rng);
        FRAut scramble = random_fr_aut(sp, depth, rng, true);
        auto input = scramble.apply(sp, standard_set(sp));
        auto res = shorten(sp, input);
        const auto& rep = res.report;
        bool good = res.phi.in_fr0() && res.phi.verify(sp) && res.phi.apply(sp, input) == res.image;
        good = good && rep.s_final <= rep.bound &&
               rep.bound == bound_constant(sp.factors(), sp.free_rank, static_cast<long>(size), sp.grushko_rank()) *
                                std::max<std::int64_t>(1, rep.D);
        for (std::size_t k = 1; k < rep.kappa_history.size(); ++k) good = good && rep.kappa_history[k] < rep.kappa_history[k - 1];
        for (std::size_t k = 1; k < rep.s_history.size(); ++k) good = good && rep.s_history[k] <= rep.s_history[k - 1];
        for (int j = 0; j < sp.free_rank; ++j) {
          const FPWord& tj = res.image[size - static_cast<std::size_t>(sp.free_rank) + static_cast<std::size_t>(j)];
          long dj = std::max(rep.D, s_functional(sp, {tj}, 3).value);
          good = good && boring_arc_check(sp, tj, dj).holds;
        }
        if (good) ++ok;
      }
      all = all && ok == trials;
      detail += c.name + " " + std::to_string(ok) + "/" + std::to_string(trials) + "; ";
    }
    r.pass = all;
    r.detail = detail;
  });
}

inline CriterionResult idempotence(std::uint64_t seed) {
  return detail::timed(8, "round trips and idempotence", 300, [&](CriterionResult& r) {
    std::mt19937_64 rng(seed ^ 0x58);
    std::uniform_int_distribution<std::size_t> nv(1, 6), dim(1, 4);
    std::uniform_real_distribution<double> dens(0.2, 0.8);
    const int n_inputs = 1000;
    int words_ok = 0, lattices_ok = 0, graphs_ok = 0;
    for (int t = 0; t < n_inputs; ++t) {
      auto g = inputs::random_graph(nv(rng), dens(rng), rng);
      auto w = inputs::random_word(g, 10, rng);
      auto cr = cyclically_reduce(w);
      auto cr2 = cyclically_reduce(cr.core);
      if (NormalWord(g, w.letters()) == w && cr2.core == cr.core && cr2.conjugator.is_identity() &&
          multiply(multiply(cr.conjugator, cr.core), invert(cr.conjugator)) == w)
        ++words_ok;

      std::size_t d = dim(rng);
      auto lat = inputs::random_lattice(d, std::uniform_int_distribution<std::size_t>(1, d)(rng), 6, rng);
      auto sat = saturation(lat);
      if (saturation(sat) == sat && contains_lattice(sat, lat)) ++lattices_ok;

      auto svp = svp_closure(*g);
      std::set<VertexSet> fam(svp.begin(), svp.end());
      bool closed = true;
      for (const auto& s : singular_subgraphs(*g, g->all())) closed = closed && fam.count(s);
      for (const auto& s : svp)
        for (const auto& c : children(*g, s)) closed = closed && fam.count(c);
      auto h = hierarchy_fixpoint(g);
      auto hs = h.sets();
      std::set<VertexSet> hfam(hs.begin(), hs.end());
      for (const auto& s : hs)
        for (const auto& c : hierarchy_successors(*g, s)) closed = closed && hfam.count(c);
      if (closed) ++graphs_ok;
    }
    const int composites = 200;
    int inverse_ok = 0;
    for (int t = 0; t < composites; ++t) {
      auto g = inputs::random_graph(std::uniform_int_distribution<std::size_t>(2, 5)(rng), dens(rng), rng);
      auto gens = ls_generators(g);
      RaagAut f = RaagAut::identity(g);
      int len = std::uniform_int_distribution<int>(1, 6)(rng);
      for (int k = 0; k < len; ++k)
        f = compose(f, gens[std::uniform_int_distribution<std::size_t>(0, gens.size() - 1)(rng)]);
      auto id = compose(f, inverse(f));
      auto id2 = compose(inverse(f), f);
      if (id.images() == RaagAut::identity(g).images() && id2.images() == RaagAut::identity(g).images())
        ++inverse_ok;
    }
    r.pass = words_ok == n_inputs && lattices_ok == n_inputs && graphs_ok == n_inputs && inverse_ok == composites;
    r.detail = "words " + std::to_string(words_ok) + ", lattices " + std::to_string(lattices_ok) + ", graphs " +
               std::to_string(graphs_ok) + " of " + std::to_string(n_inputs) + "; inverses " +
               std::to_string(inverse_ok) + "/" + std::to_string(composites);
  });
}

using Criterion = std::function<CriterionResult(std::uint64_t)>;

inline std::vector<Criterion> all_criteria() {
  return {sandwich, star_equivalence, hyperplanes, twist_taxonomy,
          coset_enumeration, poison_pipeline, shortening, idempotence};
}

/// Runs the selected criteria (all when `only` is empty), printing each line
/// as it completes.
inline std::vector<CriterionResult> run_all(std::uint64_t seed, std::ostream* out = nullptr,
                                            const std::set<int>& only = {}) {
  std::vector<CriterionResult> results;
  auto crits = all_criteria();
  for (std::size_t i = 0; i < crits.size(); ++i) {
    if (!only.empty() && !only.count(static_cast<int>(i) + 1)) continue;
    results.push_back(crits[i](seed));
    if (out) *out << format_line(results.back()) << std::endl;
  }
  return results;
}

}  // namespace twistbench::acceptance
