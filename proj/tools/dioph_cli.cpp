// Command-line front end: every analysis is a subcommand with JSON input and
// a JSON report on stdout. Exit codes: 0 computed, 2 invalid input, 3 budget
// exceeded, 4 broken internal invariant. Diagnostics go to stderr only.

#include <CLI11.hpp>
#include <omp.h>

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "dioph/errors.hpp"
#include "dioph/json_io.hpp"
#include "dioph/linalg.hpp"

namespace {

using namespace dioph;

struct InputSource {
  std::string path;
  std::string inline_json;

  Json load() const {
    if (!path.empty() && !inline_json.empty())
      throw_invalid("give either an input file or --json, not both");
    if (!inline_json.empty()) return Json::parse(inline_json);
    if (path.empty()) throw_invalid("an input source is required");
    std::ifstream in(path);
    if (!in) throw_invalid("cannot open input file: " + path);
    return Json::parse(in);
  }

  void attach(CLI::App* sub) {
    sub->add_option("input", path, "input file (JSON)");
    sub->add_option("--json", inline_json, "inline JSON instead of a file");
  }
};

// Matrices may carry linearly dependent rows; the row space, column spans and
// the columns condition are unchanged when they are dropped, and the matroid
// profiles require full row rank.
struct ReducedMatrix {
  QMatrix matrix;
  std::vector<std::size_t> dropped;
};

ReducedMatrix load_reduced(const InputSource& src) {
  QMatrix m = matrix_from_json(src.load());
  ReducedMatrix out;
  std::vector<std::size_t> kept = independent_row_indices(m);
  out.matrix = m.select_rows(kept);
  std::vector<bool> is_kept(m.rows(), false);
  for (std::size_t i : kept) is_kept[i] = true;
  for (std::size_t i = 0; i < m.rows(); ++i)
    if (!is_kept[i]) out.dropped.push_back(i);
  return out;
}

Json dropped_to_json(const std::vector<std::size_t>& dropped) {
  Json arr = Json::array();
  for (std::size_t i : dropped) arr.push_back(i + 1);
  return arr;
}

std::vector<Rat> parse_rat_list(const std::string& csv) {
  std::vector<Rat> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t comma = csv.find(',', pos);
    if (comma == std::string::npos) comma = csv.size();
    out.push_back(rat_from_string(csv.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact analysis of systems of diagonal equations"};
  app.require_subcommand(1);

  bool pretty = false;
  int threads = 0;
  bool inject_fault = false;
  app.add_flag("--pretty", pretty, "indent the JSON report");
  app.add_option("--threads", threads, "cap internal parallelism (0 = default)");
  app.add_flag("--inject-fault", inject_fault, "trigger an internal fault (testing only)")
      ->group("");

  // Each subcommand fills `run` with a closure producing the result payload
  // and `request` with the echoed options.
  std::function<Json()> run;
  Json request;

  auto set_request = [&](const std::string& name, Json options) {
    request = Json{{"subcommand", name}, {"options", std::move(options)}};
  };

  // ---- structural analyses -------------------------------------------

  {
    auto* sub = app.add_subcommand("analyze", "columns condition + condition (I) + verdict");
    auto src = std::make_shared<InputSource>();
    auto k = std::make_shared<unsigned>(2);
    src->attach(sub);
    sub->add_option("--k", *k, "degree of the system")->required();
    sub->callback([&, src, k] {
      set_request("analyze", Json{{"k", *k}, {"input", src->path.empty() ? "inline" : src->path}});
      run = [src, k] {
        ReducedMatrix rm = load_reduced(*src);
        if (!rm.matrix.is_integral()) throw_invalid("analyze requires an integer matrix");
        auto cert = check_columns_condition(rm.matrix);
        ConditionIReport cond = check_condition_I(rm.matrix, *k);
        std::string verdict;
        if (!cert)
          verdict = "not partition regular (columns condition fails)";
        else if (cond.holds)
          verdict = "partition regular (columns condition and condition (I) hold)";
        else
          verdict = "undecided (condition (I) fails; the regularity criterion does not apply)";
        Json out{{"columnsCondition",
                  Json{{"holds", cert.has_value()},
                       {"certificate", cert ? columns_certificate_to_json(*cert) : Json(nullptr)}}},
                 {"conditionI", condition_i_to_json(cond)},
                 {"verdict", verdict}};
        if (*k >= 2 && rm.matrix.rows() >= 1) {
          AnalyticConstants ac = analytic_constants(*k, static_cast<unsigned>(rm.matrix.rows()));
          out["analyticConstants"] = Json{{"p", rat_to_json(ac.p)},
                                          {"eta", rat_to_json(ac.eta)},
                                          {"deltaTrivial", rat_to_json(ac.delta_triv)},
                                          {"tK", ac.t_k}};
        }
        out["droppedRows"] = dropped_to_json(rm.dropped);
        return out;
      };
    });
  }

  {
    auto* sub = app.add_subcommand("mu-q", "mu and q profiles of the column matroid");
    auto src = std::make_shared<InputSource>();
    src->attach(sub);
    sub->callback([&, src] {
      set_request("mu-q", Json{{"input", src->path.empty() ? "inline" : src->path}});
      run = [src] {
        ReducedMatrix rm = load_reduced(*src);
        return Json{{"mu", mu_profile_to_json(mu_profile(rm.matrix))},
                    {"q", q_profile_to_json(q_profile(rm.matrix))},
                    {"droppedRows", dropped_to_json(rm.dropped)}};
      };
    });
  }

  {
    auto* sub = app.add_subcommand("condition-i", "nonsingularity condition q(d) >= d k^2 + 1");
    auto src = std::make_shared<InputSource>();
    auto k = std::make_shared<unsigned>(2);
    src->attach(sub);
    sub->add_option("--k", *k, "degree")->required();
    sub->callback([&, src, k] {
      set_request("condition-i", Json{{"k", *k}});
      run = [src, k] {
        ReducedMatrix rm = load_reduced(*src);
        return Json{{"conditionI", condition_i_to_json(check_condition_I(rm.matrix, *k))},
                    {"droppedRows", dropped_to_json(rm.dropped)}};
      };
    });
  }

  {
    auto* sub = app.add_subcommand("partition", "split the columns into k nonsingular blocks");
    auto src = std::make_shared<InputSource>();
    auto k = std::make_shared<std::size_t>(2);
    src->attach(sub);
    sub->add_option("--k", *k, "number of blocks")->required();
    sub->callback([&, src, k] {
      set_request("partition", Json{{"k", *k}});
      run = [src, k] {
        QMatrix m = matrix_from_json(src->load());
        return Json{{"partition", partition_to_json(*k, is_k_partitionable(m, *k))}};
      };
    });
  }

  {
    auto* sub = app.add_subcommand("quasi", "quasi-partitionability report");
    auto src = std::make_shared<InputSource>();
    auto q = std::make_shared<std::size_t>(1);
    src->attach(sub);
    sub->add_option("--q", *q, "partition parameter")->required();
    sub->callback([&, src, q] {
      set_request("quasi", Json{{"q", *q}});
      run = [src, q] {
        QMatrix m = matrix_from_json(src->load());
        return Json{{"quasi", quasi_to_json(*q, is_quasi_partitionable(m, *q))}};
      };
    });
  }

  {
    auto* sub = app.add_subcommand("decompose", "block upper triangular quasi decomposition");
    auto src = std::make_shared<InputSource>();
    auto q = std::make_shared<std::size_t>(1);
    src->attach(sub);
    sub->add_option("--q", *q, "partition parameter")->required();
    sub->callback([&, src, q] {
      set_request("decompose", Json{{"q", *q}});
      run = [src, q] {
        QMatrix m = matrix_from_json(src->load());
        return Json{{"decomposition", decomposition_to_json(decompose_quasi(m, *q))}};
      };
    });
  }

  {
    auto* sub = app.add_subcommand("columns", "columns condition certificate");
    auto src = std::make_shared<InputSource>();
    src->attach(sub);
    sub->callback([&, src] {
      set_request("columns", Json::object());
      run = [src] {
        QMatrix m = matrix_from_json(src->load());
        auto cert = check_columns_condition(m);
        return Json{{"holds", cert.has_value()},
                    {"certificate", cert ? columns_certificate_to_json(*cert) : Json(nullptr)}};
      };
    });
  }

  {
    auto* sub = app.add_subcommand("normal-form", "equivalence to the (A B; 0 C) block form");
    auto src = std::make_shared<InputSource>();
    src->attach(sub);
    sub->callback([&, src] {
      set_request("normal-form", Json::object());
      run = [src] {
        ReducedMatrix rm = load_reduced(*src);
        Json out{{"normalForm", normal_form_to_json(to_normal_form(rm.matrix))}};
        out["droppedRows"] = dropped_to_json(rm.dropped);
        return out;
      };
    });
  }

  {
    auto* sub = app.add_subcommand("preprocess", "rescaling and row reduction of (A, B, C)");
    auto src = std::make_shared<InputSource>();
    auto k = std::make_shared<unsigned>(2);
    src->attach(sub);
    sub->add_option("--k", *k, "degree")->required();
    sub->callback([&, src, k] {
      set_request("preprocess", Json{{"k", *k}});
      run = [src, k] {
        Json in = src->load();
        PreprocessedSystem p =
            preprocess_system(matrix_from_json(in.at("A")), matrix_from_json(in.at("B")),
                              matrix_from_json(in.at("C")), *k);
        return Json{{"preprocessed", preprocessed_to_json(p)}};
      };
    });
  }

  // ---- counting --------------------------------------------------------

  {
    auto* sub = app.add_subcommand("count", "exact solution counts over [1, N]");
    auto src = std::make_shared<InputSource>();
    auto k = std::make_shared<unsigned>(1);
    auto n = std::make_shared<long>(0);
    auto domains_path = std::make_shared<std::string>();
    src->attach(sub);
    sub->add_option("--k", *k, "degree")->required();
    sub->add_option("--N", *n, "domain bound")->required();
    sub->add_option("--domains", *domains_path, "per-variable domain file (JSON array of arrays)");
    sub->callback([&, src, k, n, domains_path] {
      set_request("count", Json{{"k", *k}, {"N", *n}});
      run = [src, k, n, domains_path] {
        DiagonalSystem sys = make_system(matrix_from_json(src->load()), *k);
        std::optional<std::vector<Domain>> domains;
        if (!domains_path->empty()) {
          std::ifstream in(*domains_path);
          if (!in) throw_invalid("cannot open domain file: " + *domains_path);
          Json dj = Json::parse(in);
          domains.emplace();
          for (const Json& d : dj) domains->push_back(d.get<Domain>());
        }
        return counts_to_json(sys, count_solutions(sys, *n, domains));
      };
    });
  }

  {
    auto* sub = app.add_subcommand("trivial", "solutions with two chosen coordinates equal");
    auto src = std::make_shared<InputSource>();
    auto k = std::make_shared<unsigned>(1);
    auto n = std::make_shared<long>(0);
    auto u = std::make_shared<std::size_t>(1);
    auto v = std::make_shared<std::size_t>(2);
    src->attach(sub);
    sub->add_option("--k", *k, "degree")->required();
    sub->add_option("--N", *n, "domain bound")->required();
    sub->add_option("--u", *u, "first coordinate (1-based)")->required();
    sub->add_option("--v", *v, "second coordinate (1-based)")->required();
    sub->callback([&, src, k, n, u, v] {
      set_request("trivial", Json{{"k", *k}, {"N", *n}, {"u", *u}, {"v", *v}});
      run = [src, k, n, u, v] {
        if (*u < 1 || *v < 1) throw_invalid("coordinates are 1-based");
        DiagonalSystem sys = make_system(matrix_from_json(src->load()), *k);
        return Json{{"count", int_to_json(count_trivial_pair(sys, *n, *u - 1, *v - 1))}};
      };
    });
  }

  {
    auto* sub = app.add_subcommand("mean-value", "even moments of the k-th power counts");
    auto k = std::make_shared<unsigned>(2);
    auto t = std::make_shared<unsigned>(1);
    auto n = std::make_shared<long>(0);
    auto series = std::make_shared<std::string>();
    sub->add_option("--k", *k, "power")->required();
    sub->add_option("--t", *t, "summands per side")->required();
    sub->add_option("--N", *n, "domain bound");
    sub->add_option("--series", *series, "comma-separated bounds; adds an exponent fit");
    sub->callback([&, k, t, n, series] {
      set_request("mean-value", Json{{"k", *k}, {"t", *t}, {"N", *n}, {"series", *series}});
      run = [k, t, n, series] {
        if (series->empty()) {
          if (*n < 1) throw_invalid("--N is required without --series");
          MomentRecord rec = mean_value(*k, *t, *n);
          return Json{{"k", rec.k}, {"t", rec.t}, {"N", rec.n}, {"value", int_to_json(rec.value)}};
        }
        std::vector<std::pair<long, Int>> data;
        Json points = Json::array();
        std::size_t pos = 0;
        while (pos < series->size()) {
          std::size_t comma = series->find(',', pos);
          if (comma == std::string::npos) comma = series->size();
          long bound = std::stol(series->substr(pos, comma - pos));
          pos = comma + 1;
          MomentRecord rec = mean_value(*k, *t, bound);
          data.emplace_back(bound, rec.value);
          points.push_back(Json{{"N", bound}, {"value", int_to_json(rec.value)}});
        }
        ExponentFit fit = exponent_fit(data);
        return Json{{"k", *k},
                    {"t", *t},
                    {"series", points},
                    {"fit",
                     Json{{"slope", fit.slope},
                          {"intercept", fit.intercept},
                          {"maxResidual", fit.max_residual}}}};
      };
    });
  }

  {
    auto* sub = app.add_subcommand("moments", "convolution route vs direct pairing route");
    auto k = std::make_shared<unsigned>(2);
    auto t = std::make_shared<unsigned>(1);
    auto n = std::make_shared<long>(1);
    sub->add_option("--k", *k, "power")->required();
    sub->add_option("--t", *t, "summands per side")->required();
    sub->add_option("--N", *n, "domain bound")->required();
    sub->callback([&, k, t, n] {
      set_request("moments", Json{{"k", *k}, {"t", *t}, {"N", *n}});
      run = [k, t, n] {
        auto [conv, pairing] = even_moment_check(*k, *t, *n);
        check_internal(conv == pairing, "moment routes disagree");
        return Json{{"convolution", int_to_json(conv)},
                    {"pairing", int_to_json(pairing)},
                    {"equal", conv == pairing}};
      };
    });
  }

  // ---- regularity lab ----------------------------------------------------

  {
    auto* sub = app.add_subcommand("coloring", "search for a solution-free coloring");
    auto src = std::make_shared<InputSource>();
    auto k = std::make_shared<unsigned>(1);
    auto n = std::make_shared<long>(0);
    auto r = std::make_shared<unsigned>(2);
    auto budget = std::make_shared<std::uint64_t>(ColoringConfig{}.node_budget);
    src->attach(sub);
    sub->add_option("--k", *k, "degree")->required();
    sub->add_option("--N", *n, "interval bound")->required();
    sub->add_option("--r", *r, "number of colors")->required();
    sub->add_option("--budget", *budget, "search node budget");
    sub->callback([&, src, k, n, r, budget] {
      set_request("coloring", Json{{"k", *k}, {"N", *n}, {"r", *r}, {"budget", *budget}});
      run = [src, k, n, r, budget] {
        DiagonalSystem sys = make_system(matrix_from_json(src->load()), *k);
        ColoringConfig cfg;
        cfg.node_budget = *budget;
        auto coloring = find_bad_coloring(sys, *n, *r, cfg);
        return Json{{"found", coloring.has_value()},
                    {"coloring", coloring ? coloring_to_json(*coloring) : Json(nullptr)}};
      };
    });
  }

  {
    auto* sub = app.add_subcommand("density", "solution counts over sampled dense sets");
    auto src = std::make_shared<InputSource>();
    auto k = std::make_shared<unsigned>(2);
    auto n = std::make_shared<long>(0);
    auto delta = std::make_shared<std::string>("1");
    auto trials = std::make_shared<unsigned>(0);
    auto seed = std::make_shared<std::uint64_t>(0);
    src->attach(sub);
    sub->add_option("--k", *k, "degree")->required();
    sub->add_option("--N", *n, "interval bound")->required();
    sub->add_option("--delta", *delta, "density, as 'num/den' or an integer")->required();
    sub->add_option("--trials", *trials, "number of sampled sets")->required();
    // No ambient entropy: the seed is always explicit.
    sub->add_option("--seed", *seed, "sampling seed")->required();
    sub->callback([&, src, k, n, delta, trials, seed] {
      set_request("density", Json{{"k", *k},
                                  {"N", *n},
                                  {"delta", *delta},
                                  {"trials", *trials},
                                  {"seed", *seed}});
      run = [src, k, n, delta, trials, seed] {
        DiagonalSystem sys = make_system(matrix_from_json(src->load()), *k);
        DensityStats stats =
            density_experiment(sys, *n, rat_from_string(*delta), *trials, *seed);
        return Json{{"density", density_stats_to_json(stats)}};
      };
    });
  }

  {
    auto* sub = app.add_subcommand("syndetic", "multiplicative syndeticity and density bound");
    auto src = std::make_shared<InputSource>();
    auto window = std::make_shared<long>(1);
    auto n = std::make_shared<long>(0);
    src->attach(sub);
    sub->add_option("--M", *window, "window size")->required();
    sub->add_option("--N", *n, "check bound")->required();
    sub->callback([&, src, window, n] {
      set_request("syndetic", Json{{"M", *window}, {"N", *n}});
      run = [src, window, n] {
        IntegerSet s = integer_set_from_json(src->load(), *window * *n);
        SyndeticityReport rep = check_mult_syndetic(s, *window, *n);
        SyndeticDensityReport density = syndetic_density_check(s, *window, *n);
        return syndeticity_to_json(rep, density);
      };
    });
  }

  {
    auto* sub = app.add_subcommand("bohr", "polynomial Bohr set membership");
    auto src = std::make_shared<InputSource>();
    auto n = std::make_shared<long>(0);
    auto m0_cap = std::make_shared<long>(0);
    auto rec_budget = std::make_shared<double>(0);
    src->attach(sub);
    sub->add_option("--N", *n, "membership bound")->required();
    sub->add_option("--m0-cap", *m0_cap, "also search the least syndeticity window, up to cap");
    sub->add_option("--recurrence-budget", *rec_budget,
                    "also scan min ||n^h a|| against C N^(-2^-h) (single phase)");
    sub->callback([&, src, n, m0_cap, rec_budget] {
      set_request("bohr", Json{{"N", *n}, {"m0Cap", *m0_cap}, {"recurrenceBudget", *rec_budget}});
      run = [src, n, m0_cap, rec_budget] {
        BohrSpec spec = bohr_spec_from_json(src->load());
        std::vector<long> members = bohr_set(spec, *n);
        Json marr = Json::array();
        for (long m : members) marr.push_back(m);
        Json out{{"spec", bohr_spec_to_json(spec)}, {"count", members.size()}, {"members", marr}};
        if (*m0_cap > 0) {
          BohrSyndeticityResult res = bohr_syndetic_constant(spec, *m0_cap);
          out["syndeticity"] = Json{{"m0", res.m0}, {"period", res.period}};
        }
        if (*rec_budget > 0) {
          if (spec.phases.size() != 1)
            throw_invalid("the recurrence scan needs exactly one phase");
          RecurrenceReport rep = bohr_recurrence_check(spec.h, spec.phases[0], *n, *rec_budget);
          out["recurrence"] = Json{{"minDistance", rat_to_json(rep.min_distance)},
                                   {"argmin", rep.argmin},
                                   {"budget", rep.budget},
                                   {"withinBudget", rep.within_budget}};
        }
        return out;
      };
    });
  }

  {
    auto* sub = app.add_subcommand("wtrick", "W-trick parameter validation");
    auto k = std::make_shared<unsigned>(2);
    auto w = std::make_shared<unsigned>(1);
    auto n = std::make_shared<long>(1);
    auto zeta = std::make_shared<long>(1);
    auto xi = std::make_shared<long>(1);
    sub->add_option("--k", *k, "degree")->required();
    sub->add_option("--w", *w, "prime threshold")->required();
    sub->add_option("--N", *n, "interval bound")->required();
    sub->add_option("--zeta", *zeta, "w-smooth scale");
    sub->add_option("--xi", *xi, "residue, coprime to W");
    sub->callback([&, k, w, n, zeta, xi] {
      set_request("wtrick",
                  Json{{"k", *k}, {"w", *w}, {"N", *n}, {"zeta", *zeta}, {"xi", *xi}});
      run = [k, w, n, zeta, xi] {
        return Json{{"params", wparams_to_json(w_params(*k, *w, *n, Int(*zeta), Int(*xi)))}};
      };
    });
  }

  {
    auto* sub = app.add_subcommand("transfer", "exact crude transfer inequality check");
    auto src = std::make_shared<InputSource>();
    src->attach(sub);
    sub->callback([&, src] {
      set_request("transfer", Json::object());
      run = [src] {
        Json in = src->load();
        TransferInstance inst;
        inst.a = matrix_from_json(in.at("A"));
        inst.b = matrix_from_json(in.at("B"));
        inst.c = matrix_from_json(in.at("C"));
        inst.k = in.at("k").get<unsigned>();
        long n = in.at("N").get<long>();
        inst.params = w_params(inst.k, in.at("w").get<unsigned>(), n,
                               int_from_json(in.value("zeta", Json(1))),
                               int_from_json(in.value("xi", Json(1))));
        inst.set_a = integer_set_from_json(in.at("setA"), n);
        inst.set_s = integer_set_from_json(in.at("setS"), n);
        return Json{{"transfer", transfer_report_to_json(crude_transfer_check(inst))}};
      };
    });
  }

  {
    auto* sub = app.add_subcommand("psi", "auxiliary shifted-window counting operator");
    auto src = std::make_shared<InputSource>();
    src->attach(sub);
    sub->callback([&, src] {
      set_request("psi", Json::object());
      run = [src] {
        Json in = src->load();
        std::vector<Int> y;
        for (const Json& e : in.at("y")) y.push_back(int_from_json(e));
        std::vector<long> b_set;
        for (const Json& e : in.at("bSet")) b_set.push_back(e.get<long>());
        AuxOperatorSpec spec = make_aux_spec(matrix_from_json(in.at("A")),
                                             matrix_from_json(in.at("B")),
                                             in.at("k").get<unsigned>(), y, b_set);
        std::vector<Weights> weights;
        for (const Json& w : in.at("weights")) weights.push_back(weights_from_json(w));
        return Json{{"value", rat_to_json(aux_psi(spec, weights))}};
      };
    });
  }

  // Global flags remain usable after the subcommand name.
  for (CLI::App* sub : app.get_subcommands([](CLI::App*) { return true; })) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  auto started = std::chrono::steady_clock::now();
  try {
    if (inject_fault) throw_internal("injected fault");
    if (threads > 0) omp_set_num_threads(threads);
    Json result = run();
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    Json report{{"toolVersion", DIOPH_VERSION},
                {"request", request},
                {"result", result},
                {"timing", Json{{"seconds", seconds}}}};
    std::cout << report.dump(pretty ? 2 : -1) << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case Errc::InvalidInput:
        return 2;
      case Errc::BudgetExceeded:
        return 3;
      case Errc::Internal:
        return 4;
    }
    return 4;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
