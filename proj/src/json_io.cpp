#include "dioph/json_io.hpp"

#include <algorithm>

#include "dioph/errors.hpp"

namespace dioph {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw_invalid("malformed JSON: " + what);
}

std::size_t size_from_json(const Json& j, const char* what) {
  require(j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() >= 0),
          std::string(what) + " must be a nonnegative integer");
  return j.get<std::size_t>();
}

Json indices_to_json(const std::vector<std::size_t>& idx) {
  Json arr = Json::array();
  for (std::size_t i : idx) arr.push_back(i + 1);
  return arr;
}

std::vector<std::size_t> indices_from_json(const Json& j) {
  require(j.is_array(), "expected an index array");
  std::vector<std::size_t> idx;
  for (const Json& e : j) {
    std::size_t v = size_from_json(e, "index");
    require(v >= 1, "indices are 1-based");
    idx.push_back(v - 1);
  }
  return idx;
}

}  // namespace

Json int_to_json(const Int& v) { return v.get_str(); }

Int int_from_json(const Json& j) {
  if (j.is_number_integer()) return Int(static_cast<long>(j.get<long long>()));
  require(j.is_string(), "expected an integer literal");
  return int_from_string(j.get<std::string>());
}

Json rat_to_json(const Rat& v) {
  return Json::array({rat_num(v).get_str(), rat_den(v).get_str()});
}

Rat rat_from_json(const Json& j) {
  if (j.is_string()) return rat_from_string(j.get<std::string>());
  if (j.is_number_integer()) return Rat(Int(static_cast<long>(j.get<long long>())));
  require(j.is_array() && j.size() == 2, "rationals are [\"num\",\"den\"] pairs");
  return make_rat(int_from_json(j[0]), int_from_json(j[1]));
}

Json matrix_to_json(const QMatrix& m) {
  Json entries = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) entries.push_back(rat_to_json(m.at(i, j)));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

QMatrix matrix_from_json(const Json& j) {
  require(j.is_object() && j.contains("rows") && j.contains("cols") && j.contains("entries"),
          "matrix needs rows, cols, entries");
  std::size_t rows = size_from_json(j["rows"], "rows");
  std::size_t cols = size_from_json(j["cols"], "cols");
  const Json& entries = j["entries"];
  require(entries.is_array() && entries.size() == rows * cols,
          "entry count must equal rows*cols");
  QMatrix m(rows, cols);
  std::size_t idx = 0;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = rat_from_json(entries[idx++]);
  return m;
}

Json transform_to_json(const Transform& t) {
  Json perm = Json::array();
  for (std::size_t p : t.col_perm) perm.push_back(p + 1);
  Json ops = Json::array();
  for (const RowOp& op : t.row_ops) {
    if (const auto* sw = std::get_if<RowSwap>(&op))
      ops.push_back(Json{{"op", "swap"}, {"i", sw->i + 1}, {"j", sw->j + 1}});
    else if (const auto* sc = std::get_if<RowScale>(&op))
      ops.push_back(Json{{"op", "scale"}, {"i", sc->i + 1}, {"factor", rat_to_json(sc->factor)}});
    else {
      const auto& am = std::get<RowAddMul>(op);
      ops.push_back(Json{{"op", "addmul"},
                         {"src", am.src + 1},
                         {"dst", am.dst + 1},
                         {"factor", rat_to_json(am.factor)}});
    }
  }
  return Json{{"colPerm", perm}, {"rowOps", ops}};
}

Transform transform_from_json(const Json& j) {
  require(j.is_object() && j.contains("colPerm") && j.contains("rowOps"),
          "transform needs colPerm and rowOps");
  Transform t;
  t.col_perm = indices_from_json(j["colPerm"]);
  for (const Json& op : j["rowOps"]) {
    require(op.is_object() && op.contains("op"), "row op needs a kind");
    std::string kind = op["op"].get<std::string>();
    if (kind == "swap")
      t.row_ops.push_back(RowSwap{size_from_json(op["i"], "i") - 1,
                                  size_from_json(op["j"], "j") - 1});
    else if (kind == "scale")
      t.row_ops.push_back(
          RowScale{size_from_json(op["i"], "i") - 1, rat_from_json(op["factor"])});
    else if (kind == "addmul")
      t.row_ops.push_back(RowAddMul{size_from_json(op["src"], "src") - 1,
                                    size_from_json(op["dst"], "dst") - 1,
                                    rat_from_json(op["factor"])});
    else
      require(false, "unknown row op '" + kind + "'");
  }
  return t;
}

Json columns_certificate_to_json(const ColumnsCertificate& cert) {
  Json blocks = Json::array();
  for (const auto& b : cert.blocks) blocks.push_back(indices_to_json(b));
  Json witnesses = Json::array();
  for (const auto& w : cert.witnesses) {
    Json combo = Json::array();
    for (const auto& [col, coeff] : w)
      combo.push_back(Json{{"col", col + 1}, {"coeff", rat_to_json(coeff)}});
    witnesses.push_back(combo);
  }
  return Json{{"blocks", blocks}, {"witnesses", witnesses}};
}

ColumnsCertificate columns_certificate_from_json(const Json& j) {
  require(j.is_object() && j.contains("blocks") && j.contains("witnesses"),
          "certificate needs blocks and witnesses");
  ColumnsCertificate cert;
  for (const Json& b : j["blocks"]) cert.blocks.push_back(indices_from_json(b));
  for (const Json& w : j["witnesses"]) {
    std::vector<std::pair<std::size_t, Rat>> combo;
    for (const Json& term : w)
      combo.emplace_back(size_from_json(term["col"], "col") - 1, rat_from_json(term["coeff"]));
    cert.witnesses.push_back(std::move(combo));
  }
  return cert;
}

Json normal_form_to_json(const NormalForm& nf) {
  Json out{{"transform", transform_to_json(nf.transform)},
           {"n", nf.n},
           {"s", nf.s},
           {"m", nf.m},
           {"t", nf.t},
           {"A", matrix_to_json(nf.A)},
           {"B", matrix_to_json(nf.B)},
           {"C", matrix_to_json(nf.C)}};
  out["certificateC"] =
      nf.c_certificate ? columns_certificate_to_json(*nf.c_certificate) : Json(nullptr);
  return out;
}

Json decomposition_to_json(const DecompositionResult& res) {
  Json blocks = Json::array();
  for (std::size_t i = 0; i < res.diagonal.size(); ++i)
    blocks.push_back(Json{{"rows", res.block_shapes[i].first},
                          {"cols", res.block_shapes[i].second},
                          {"matrix", matrix_to_json(res.diagonal[i])}});
  return Json{{"transform", transform_to_json(res.transform)},
              {"q", res.q},
              {"diagonal", blocks},
              {"transformed", matrix_to_json(res.transformed)}};
}

Json preprocessed_to_json(const PreprocessedSystem& p) {
  return Json{{"A", matrix_to_json(p.A)},
              {"B", matrix_to_json(p.B)},
              {"C", matrix_to_json(p.C)},
              {"K", int_to_json(p.K)},
              {"k", p.k},
              {"rescaleFactor", int_to_json(p.rescale_factor)}};
}

Json mu_profile_to_json(const MuProfile& p) {
  Json arr = Json::array();
  for (std::size_t v : p.values) arr.push_back(v);
  return arr;
}

Json q_profile_to_json(const QProfile& p) {
  Json arr = Json::array();
  for (std::size_t v : p.values) arr.push_back(v);
  return arr;
}

Json condition_i_to_json(const ConditionIReport& rep) {
  Json failures = Json::array();
  for (const auto& f : rep.failures)
    failures.push_back(Json{{"d", f.d}, {"q", f.q_d}, {"threshold", f.threshold}});
  return Json{{"k", rep.degree}, {"holds", rep.holds}, {"failures", failures}};
}

Json partition_to_json(std::size_t k, const std::optional<PartitionCertificate>& cert) {
  Json blocks(nullptr);
  if (cert) {
    blocks = Json::array();
    for (const auto& b : cert->blocks) blocks.push_back(indices_to_json(b));
  }
  return Json{{"k", k}, {"blocks", blocks}};
}

Json quasi_to_json(std::size_t q, const QuasiReport& rep) {
  Json out{{"q", q}, {"holds", rep.holds}, {"sizeOk", rep.size_ok}};
  out["violatedD"] = rep.violated_d ? Json(*rep.violated_d) : Json(nullptr);
  out["muAtViolation"] = rep.mu_at_violation ? Json(*rep.mu_at_violation) : Json(nullptr);
  return out;
}

Json system_to_json(const DiagonalSystem& sys) {
  return Json{{"matrix", matrix_to_json(sys.matrix)}, {"k", sys.degree}};
}

DiagonalSystem system_from_json(const Json& j) {
  require(j.is_object() && j.contains("matrix") && j.contains("k"), "system needs matrix and k");
  return make_system(matrix_from_json(j["matrix"]), j["k"].get<unsigned>());
}

Json counts_to_json(const DiagonalSystem& sys, const SolutionCount& c) {
  return Json{{"system", system_to_json(sys)},
              {"N", c.bound},
              {"counts",
               Json{{"total", int_to_json(c.total)},
                    {"trivial", int_to_json(c.trivial)},
                    {"nontrivial", int_to_json(c.nontrivial)}}}};
}

std::string coloring_to_rle(const Coloring& c) {
  std::string out;
  std::size_t i = 0;
  while (i < c.colors.size()) {
    std::size_t j = i;
    while (j < c.colors.size() && c.colors[j] == c.colors[i]) ++j;
    if (!out.empty()) out += ',';
    out += std::to_string(j - i) + "x" + std::to_string(c.colors[i]);
    i = j;
  }
  return out;
}

Json coloring_to_json(const Coloring& c) {
  return Json{{"N", c.n}, {"colors", coloring_to_rle(c)}};
}

Json bohr_spec_to_json(const BohrSpec& spec) {
  Json phases = Json::array();
  for (const Rat& a : spec.phases) phases.push_back(rat_to_json(a));
  return Json{{"h", spec.h}, {"phases", phases}, {"rho", rat_to_json(spec.rho)}};
}

BohrSpec bohr_spec_from_json(const Json& j) {
  require(j.is_object() && j.contains("h") && j.contains("phases") && j.contains("rho"),
          "Bohr spec needs h, phases, rho");
  std::vector<Rat> phases;
  for (const Json& p : j["phases"]) phases.push_back(rat_from_json(p));
  return make_bohr_spec(j["h"].get<unsigned>(), std::move(phases), rat_from_json(j["rho"]));
}

Json wparams_to_json(const WTrickParams& p) {
  return Json{{"k", p.k},
              {"w", p.w},
              {"W", int_to_json(p.W)},
              {"kwRoot", int_to_json(p.kw_root)},
              {"xi", int_to_json(p.xi)},
              {"zeta", int_to_json(p.zeta)},
              {"N", p.n},
              {"X", rat_to_json(p.x_cap)}};
}

Json transfer_report_to_json(const TransferReport& rep) {
  return Json{{"lhs", int_to_json(rep.lhs)},
              {"rhs", int_to_json(rep.rhs)},
              {"injective", rep.injective},
              {"imagesAreSolutions", rep.images_are_solutions},
              {"a1Size", rep.a1_size},
              {"s1Size", rep.s1_size},
              {"pass", rep.pass}};
}

Json density_stats_to_json(const DensityStats& stats) {
  return Json{{"prefixCount", int_to_json(stats.prefix_count)},
              {"minCount", int_to_json(stats.min_count)},
              {"maxCount", int_to_json(stats.max_count)},
              {"meanCount", rat_to_json(stats.mean_count)},
              {"trials", stats.trials},
              {"sampleSize", stats.sample_size}};
}

Json syndeticity_to_json(const SyndeticityReport& rep, const SyndeticDensityReport& density) {
  Json failures = Json::array();
  for (long x : rep.failures) failures.push_back(x);
  return Json{{"M", rep.window},
              {"checkedUpTo", rep.checked_up_to},
              {"syndetic", rep.syndetic()},
              {"failures", failures},
              {"density",
               Json{{"count", int_to_json(density.count)},
                    {"bound", rat_to_json(density.bound)},
                    {"pass", density.pass}}}};
}

IntegerSet integer_set_from_json(const Json& j, long limit) {
  require(j.is_object() && j.contains("kind"), "set spec needs a kind");
  std::string kind = j["kind"].get<std::string>();
  if (kind == "multiples") return multiples_of(j.at("m").get<long>(), limit);
  if (kind == "explicit") {
    std::vector<long> members;
    for (const Json& m : j.at("members")) members.push_back(m.get<long>());
    return explicit_set(members, limit);
  }
  if (kind == "random-syndetic")
    return random_syndetic_set(j.at("window").get<long>(), limit,
                               j.at("seed").get<std::uint64_t>());
  require(false, "unknown set kind '" + kind + "'");
  return {};
}

Json weights_to_json(const Weights& w) {
  std::vector<std::pair<long, Rat>> sorted(w.begin(), w.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Json arr = Json::array();
  for (const auto& [x, v] : sorted) arr.push_back(Json::array({Json(x), rat_to_json(v)}));
  return arr;
}

Weights weights_from_json(const Json& j) {
  require(j.is_array(), "weights are [[x, coeff], ...] arrays");
  Weights w;
  for (const Json& term : j) {
    require(term.is_array() && term.size() == 2, "weight terms are [x, coeff]");
    w[term[0].get<long>()] = rat_from_json(term[1]);
  }
  return w;
}

}  // namespace dioph
