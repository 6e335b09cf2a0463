// Command-line driver: build, verify, magnitude, homology, entropy,
// perplexity, diversity, digraph.
//
// Exit status: 0 success, 1 verification failure, 2 usage or input error.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "textmag/category.hpp"
#include "textmag/digraph.hpp"
#include "textmag/error.hpp"
#include "textmag/format.hpp"
#include "textmag/homology.hpp"
#include "textmag/kernels.hpp"
#include "textmag/magnitude.hpp"
#include "textmag/metrics.hpp"
#include "textmag/model.hpp"

using namespace textmag;

namespace {

constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;

struct Options {
  std::string model;
  std::string prompt;
  std::string out;
  std::string dump;
  std::string method = "all";
  std::string text;
  std::string edges;
  std::vector<std::string> invert;
  double t_min = 1.0, t_max = 1.0, t = 2.0;
  std::size_t steps = 1;
  std::size_t k_max = 4;
  std::uint64_t seed = 20240601;
  bool deep = false;
};

Text prompt_text(const ModelSpec& model, const std::string& prompt) {
  return prompt.empty() ? Text::root() : parse_text(model.alphabet(), prompt);
}

// ---------------------------------------------------------------- build

int run_build(const Options& o) {
  const auto model = load_model_spec(o.model);
  const auto cat = TextCategory::build(model, prompt_text(model, o.prompt));
  std::size_t finished = 0, zero_edges = 0;
  for (ObjectId i = 0; i < cat.size(); ++i) {
    finished += cat.node(i).finished;
    if (i != 0 && cat.node(i).edge_probability == 0.0) ++zero_edges;
  }
  std::cout << "root," << spell(model.alphabet(), cat.root()) << '\n'
            << "alphabet_size," << model.alphabet().size() << '\n'
            << "cutoff," << model.cutoff().value << '\n'
            << "objects," << cat.size() << '\n'
            << "hasse_edges," << cat.size() - 1 << '\n'
            << "interior," << cat.interior_objects().size() << '\n'
            << "terminating," << cat.terminating_count() << '\n'
            << "finished," << finished << '\n'
            << "zero_probability_edges," << zero_edges << '\n';
  if (!o.dump.empty()) {
    std::ofstream out(o.dump);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write " + o.dump);
    write_category_csv(cat, out);
  }
  return 0;
}

// ---------------------------------------------------------------- verify

class Checklist {
 public:
  void check(const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << ' ' << detail << '\n';
    failed_ = failed_ || !ok;
  }
  void skip(const std::string& name, const std::string& why) { std::cout << "SKIP " << name << ' ' << why << '\n'; }
  bool failed() const { return failed_; }

 private:
  bool failed_ = false;
};

std::string max_dev(double v) { return "max_dev=" + format_real(v); }

void verify_mobius(const TextCategory& cat, const std::vector<double>& ts, Checklist& list) {
  const bool dense_ok = cat.size() <= kDefaultLimits.max_dense;
  for (double t : ts) {
    const auto closed = mobius_closed_form(cat, t);
    double path_dev = 0.0;
    const bool all_pairs = cat.size() <= 400;
    for (ObjectId y = 0; y < cat.size(); ++y) {
      if (all_pairs) {
        for (ObjectId x = 0; x < cat.size(); ++x)
          path_dev = std::max(path_dev, std::abs(mobius_path_sum(cat, t, x, y) - closed(x, y)));
      } else {
        for (ObjectId x = y;; x = cat.node(x).parent) {
          path_dev = std::max(path_dev, std::abs(mobius_path_sum(cat, t, x, y) - closed(x, y)));
          if (x == 0) break;
        }
      }
    }
    list.check("mobius.path_sum t=" + format_real(t), path_dev < kDefaultTolerances.matrix, max_dev(path_dev));
    if (dense_ok) {
      const double d = max_abs_diff(closed, mobius_dense_inverse(cat, t));
      list.check("mobius.dense t=" + format_real(t), d < kDefaultTolerances.matrix, max_dev(d));
    }
  }
  if (!dense_ok) list.skip("mobius.dense", "objects exceed the dense cap");
}

void verify_digraph(const TextCategory& cat, std::size_t samples, std::uint64_t seed, Checklist& list) {
  std::mt19937_64 rng(seed);
  double det_dev = 0.0, inv_dev = 0.0;
  std::size_t done = 0;
  const double t = 1.0;
  // Principal submatrices of ζ on random object subsets.
  const auto zeta = zeta_matrix(cat, t);
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<ObjectId> ids(cat.size());
    for (ObjectId i = 0; i < ids.size(); ++i) ids[i] = i;
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(std::min<std::size_t>(ids.size(), 8));
    std::sort(ids.begin(), ids.end());
    const auto sub = zeta.restricted(ids).entries;
    const auto d = digraph_of_matrix(sub);
    const double det = det_via_linear_subdigraphs(d);
    det_dev = std::max(det_dev, std::abs(det - kernels::determinant_serial(sub)));
    const auto inv = kernels::invert_serial(sub);
    for (Vertex v = 0; v < sub.size(); ++v)
      for (Vertex w = 0; w < sub.size(); ++w)
        inv_dev = std::max(inv_dev, std::abs(inverse_entry_via_connections(d, v, w) - inv(v, w)));
    ++done;
  }
  list.check("digraph.det_subsamples n=" + std::to_string(done), det_dev < 1e-9, max_dev(det_dev));
  list.check("digraph.inverse_subsamples n=" + std::to_string(done), inv_dev < kDefaultTolerances.matrix,
             max_dev(inv_dev));

  // Subspaces with at most 10 objects: det = 1, connections reproduce the closed form.
  const auto closed = mobius_closed_form(cat, t);
  double sub_det = 0.0, sub_inv = 0.0;
  std::size_t subspaces = 0;
  for (ObjectId x = 0; x < cat.size(); ++x) {
    const auto objs = cat.descendants(x);
    if (objs.size() > 10 || (objs.size() == 1 && x != 0)) continue;
    ++subspaces;
    const auto d = digraph_of_matrix(zeta.restricted(objs).entries);
    sub_det = std::max(sub_det, std::abs(det_via_linear_subdigraphs(d) - 1.0));
    for (Vertex v = 0; v < objs.size(); ++v)
      for (Vertex w = 0; w < objs.size(); ++w)
        sub_inv = std::max(sub_inv, std::abs(inverse_entry_via_connections(d, v, w) - closed(objs[v], objs[w])));
  }
  if (subspaces == 0) {
    list.skip("digraph.subspaces", "no subspace with at most 10 objects");
  } else {
    list.check("digraph.subspace_det n=" + std::to_string(subspaces), sub_det < 1e-9, max_dev(sub_det));
    list.check("digraph.subspace_inverse n=" + std::to_string(subspaces), sub_inv < 1e-9, max_dev(sub_inv));
  }
}

int run_verify(const Options& o) {
  LoadDiagnostics diag;
  const auto model = load_model_spec(o.model, kDefaultTolerances, &diag);
  const auto cat = TextCategory::build(model, prompt_text(model, o.prompt));
  Checklist list;
  std::cout << "INFO objects=" << cat.size() << " renormalized=" << diag.renormalized
            << " max_renormalization=" << format_real(diag.max_deviation) << '\n';

  double dist_dev = 0.0;
  for (ObjectId x : cat.interior_objects()) {
    double s = 0.0;
    for (double p : cat.distribution(x)) s += p;
    dist_dev = std::max(dist_dev, std::abs(s - 1.0));
  }
  list.check("model.pmf", dist_dev <= kDefaultTolerances.pmf, max_dev(dist_dev));

  const auto rep = check_enrichment(cat);
  list.check("enrichment.composition", rep.max_composition_excess <= kDefaultTolerances.algebra &&
                                           rep.max_chain_defect <= kDefaultTolerances.algebra,
             max_dev(rep.max_chain_defect) + (rep.exhaustive ? " exhaustive" : " chains"));
  list.check("enrichment.terminating_pmf", rep.max_pmf_defect <= kDefaultTolerances.pmf, max_dev(rep.max_pmf_defect));
  list.check("enrichment.triangle", rep.triangle_violations == 0,
             "violations=" + std::to_string(rep.triangle_violations));

  const std::vector<double> ts = o.deep ? std::vector<double>{0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 5.0}
                                        : std::vector<double>{0.5, 1.0, 2.0};
  verify_mobius(cat, ts, list);

  const double f1 = magnitude(cat, 1.0, MagnitudeMethod::entropy);
  list.check("magnitude.f1_terminating", f1 == static_cast<double>(cat.terminating_count()),
             "f(1)=" + format_real(f1));

  std::optional<HomologyTable> table;
  try {
    table = homology_ranks(cat, std::max<std::size_t>(o.k_max, cat.cutoff().value));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TooManyGenerators) throw;
    list.skip("homology", e.what());
  }
  for (double t : ts) {
    const double fe = magnitude(cat, t, MagnitudeMethod::entropy);
    const double fm = magnitude(cat, t, MagnitudeMethod::mobius);
    list.check("magnitude.mobius t=" + format_real(t), std::abs(fe - fm) < kDefaultTolerances.matrix,
               max_dev(std::abs(fe - fm)));
    if (cat.size() <= kDefaultLimits.max_dense) {
      const double fd = magnitude(cat, t, MagnitudeMethod::dense);
      list.check("magnitude.dense t=" + format_real(t), std::abs(fe - fd) < kDefaultTolerances.matrix,
                 max_dev(std::abs(fe - fd)));
    }
    if (table) {
      const double fh = magnitude(cat, t, MagnitudeMethod::euler, &*table);
      list.check("magnitude.euler t=" + format_real(t), std::abs(fe - fh) < kDefaultTolerances.matrix,
                 max_dev(std::abs(fe - fh)));
    }
  }

  const double h = 1e-4;
  const double fd = (magnitude(cat, 1 + h, MagnitudeMethod::entropy) - magnitude(cat, 1 - h, MagnitudeMethod::entropy)) / (2 * h);
  const double d1 = magnitude_derivative_at_1(cat);
  list.check("magnitude.derivative_at_1", std::abs(fd - d1) < 1e-5, max_dev(std::abs(fd - d1)));

  if (table) {
    std::size_t h00 = 0, h0pos = 0, higher = 0;
    for (const auto& r : table->rows) {
      if (r.k == 0) (table->classes[r.grade].ell == 0.0 && r.grade == 0 ? h00 : h0pos) += r.rank_h;
      if (r.k >= 2) higher += r.rank_h;
    }
    list.check("homology.H0", h00 == cat.size() && h0pos == 0,
               "rank_H00=" + std::to_string(h00) + " objects=" + std::to_string(cat.size()));
    list.check("homology.higher_vanish", higher == 0, "sum_rank_H_k>=2=" + std::to_string(higher));
    list.check("homology.face_condition", table->boundary.triangle_mismatches == 0,
               "mismatches=" + std::to_string(table->boundary.triangle_mismatches));
  }

  verify_digraph(cat, o.deep ? 20 : 3, o.seed, list);
  return list.failed() ? kVerifyFailed : 0;
}

// ---------------------------------------------------------------- magnitude

int run_magnitude(const Options& o) {
  if (o.steps < 1 || !(o.t_min > 0.0) || o.t_max < o.t_min || (o.steps > 1 && o.t_max == o.t_min))
    throw CLI::ValidationError("grid", "need 0 < t-min <= t-max, steps >= 1 and t-max > t-min when steps > 1");
  const auto model = load_model_spec(o.model);
  const auto cat = TextCategory::build(model, prompt_text(model, o.prompt));
  std::vector<double> grid(o.steps);
  for (std::size_t i = 0; i < o.steps; ++i)
    grid[i] = o.steps == 1 ? o.t_min
                           : o.t_min + (o.t_max - o.t_min) * static_cast<double>(i) / static_cast<double>(o.steps - 1);

  std::vector<MagnitudeMethod> methods;
  if (o.method == "all")
    methods = {MagnitudeMethod::entropy, MagnitudeMethod::mobius, MagnitudeMethod::dense, MagnitudeMethod::euler};
  else
    methods = {parse_method(o.method)};

  std::optional<HomologyTable> table;
  std::vector<MagnitudeCurve> curves;
  for (auto m : methods) {
    if (m == MagnitudeMethod::dense && cat.size() > kDefaultLimits.max_dense) {
      if (o.method != "all") throw Error(ErrorCode::TooLargeForDense, "category too large for dense inversion");
      std::cerr << "note: dense column skipped, " << cat.size() << " objects\n";
      continue;
    }
    if (m == MagnitudeMethod::euler && !table) {
      try {
        table = homology_ranks(cat, std::max(o.k_max, cat.cutoff().value));
      } catch (const Error& e) {
        if (o.method != "all" || e.code() != ErrorCode::TooManyGenerators) throw;
        std::cerr << "note: euler column skipped, " << e.what() << '\n';
        continue;
      }
    }
    curves.push_back(magnitude_curve(cat, grid, m, table ? &*table : nullptr));
  }

  if (o.out.empty()) {
    write_curve_csv(std::cout, curves);
  } else {
    std::ofstream out(o.out);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write " + o.out);
    write_curve_csv(out, curves);
  }
  return 0;
}

// ---------------------------------------------------------------- homology

int run_homology(const Options& o) {
  const auto model = load_model_spec(o.model);
  const auto cat = TextCategory::build(model, prompt_text(model, o.prompt));
  const auto table = homology_ranks(cat, o.k_max);
  write_homology_csv(table, std::cout);
  for (const auto& r : table.rows)
    if (r.truncation_suspect)
      std::cerr << "note: rank_H at k=" << r.k << ", ell=" << format_real(r.ell)
                << " is an upper bound; raise --k-max\n";
  return 0;
}

// ---------------------------------------------------------------- entropy

int run_entropy(const Options& o) {
  const auto model = load_model_spec(o.model);
  const auto cat = TextCategory::build(model, prompt_text(model, o.prompt));
  std::cout << "text,shannon,tsallis_" << format_real(o.t) << ",partition_" << format_real(o.t) << '\n';
  for (ObjectId x : cat.interior_objects()) {
    const auto p = cat.distribution(x);
    std::cout << spell(model.alphabet(), cat.text(x)) << ',' << format_real(shannon_entropy(p)) << ','
              << format_real(tsallis_entropy(p, o.t)) << ',' << format_real(partition_function(cat, x, o.t)) << '\n';
  }
  std::cout << "f_prime_1," << format_real(magnitude_derivative_at_1(cat)) << '\n';
  return 0;
}

// ---------------------------------------------------------------- scalars

int run_perplexity(const Options& o) {
  const auto model = load_model_spec(o.model);
  std::cout << format_real(perplexity(model, parse_text(model.alphabet(), o.text))) << '\n';
  return 0;
}

int run_diversity(const Options& o) {
  const auto model = load_model_spec(o.model);
  const Text root = prompt_text(model, o.prompt);
  const auto cat = TextCategory::build(model, root);
  if (root.finished()) throw Error(ErrorCode::FinishedText, "diversity needs an unfinished prompt");
  std::cout << format_real(diversity(cat, terminating_pmf(cat, 0), o.t)) << '\n';
  return 0;
}

int run_digraph(const Options& o) {
  std::ifstream in(o.edges);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + o.edges);
  const auto d = read_digraph(in);
  std::cout << "vertices," << d.graph.size() << '\n' << "edges," << d.graph.edge_count() << '\n';
  std::cout << "det," << format_real(det_via_linear_subdigraphs(d.graph)) << '\n';
  if (!o.invert.empty()) {
    const Vertex v = d.vertex(o.invert.at(0));
    const Vertex w = d.vertex(o.invert.at(1));
    std::cout << "connections," << enumerate_connections(d.graph, v, w).size() << '\n';
    std::cout << "inverse," << format_real(inverse_entry_via_connections(d.graph, v, w)) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magnitude, entropy and homology of categories of texts enriched by next-token models"};
  app.require_subcommand(1);
  Options o;

  auto add_model = [&](CLI::App* sub) { sub->add_option("--model", o.model, "model interchange file")->required(); };
  auto add_prompt = [&](CLI::App* sub) {
    sub->add_option("--prompt", o.prompt, "root text, e.g. \"a b\" (defaults to <bos>)");
  };

  auto* build = app.add_subcommand("build", "object and edge statistics");
  add_model(build);
  add_prompt(build);
  build->add_option("--dump", o.dump, "write the per-object CSV here");

  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  add_model(verify);
  add_prompt(verify);
  verify->add_flag("--deep", o.deep, "more scales and digraph samples");
  verify->add_option("--seed", o.seed, "seed for digraph subsamples");
  verify->add_option("--k-max", o.k_max, "minimum homology degree");

  auto* mag = app.add_subcommand("magnitude", "magnitude function on a grid");
  add_model(mag);
  add_prompt(mag);
  mag->add_option("--t-min", o.t_min)->required();
  mag->add_option("--t-max", o.t_max)->required();
  mag->add_option("--steps", o.steps)->required();
  mag->add_option("--method", o.method)->check(CLI::IsMember({"all", "entropy", "mobius", "dense", "euler"}));
  mag->add_option("--k-max", o.k_max, "homology degree for the euler method");
  mag->add_option("--out", o.out, "CSV output path (default stdout)");

  auto* hom = app.add_subcommand("homology", "magnitude homology ranks");
  add_model(hom);
  add_prompt(hom);
  hom->add_option("--k-max", o.k_max)->required();

  auto* ent = app.add_subcommand("entropy", "per-node Shannon and Tsallis entropies and f'(1)");
  add_model(ent);
  add_prompt(ent);
  ent->add_option("--t", o.t, "Tsallis order");

  auto* ppl = app.add_subcommand("perplexity", "perplexity of a text");
  add_model(ppl);
  ppl->add_option("--text", o.text, "tokens after <bos>, e.g. \"a b\"")->required();

  auto* div = app.add_subcommand("diversity", "diversity of the terminating-state pmf");
  add_model(div);
  add_prompt(div);
  div->add_option("--t", o.t)->required();

  auto* dig = app.add_subcommand("digraph", "determinant and inverse entries from digraph combinatorics");
  dig->add_option("--edges", o.edges, "edge list `src dst weight`")->required();
  dig->add_option("--invert", o.invert, "vertices v w")->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*build) return run_build(o);
    if (*verify) return run_verify(o);
    if (*mag) return run_magnitude(o);
    if (*hom) return run_homology(o);
    if (*ent) return run_entropy(o);
    if (*ppl) return run_perplexity(o);
    if (*div) return run_diversity(o);
    if (*dig) return run_digraph(o);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
