#include "commands.hpp"

#include <cstdio>
#include <random>

#include "etale/error.hpp"
#include "etale/io.hpp"
#include "etale/isotropy.hpp"
#include "etale/rep.hpp"
#include "etale/uniqueness.hpp"

namespace etale::cli {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

struct Inputs {
  ModelPtr model;
  std::optional<TwoCocycle> sigma;
  std::vector<ParsedElement> elements;
};

Inputs load(const Options& o, bool need_model = true) {
  Inputs in;
  if (o.model.empty()) {
    if (need_model) throw Error(ErrorKind::InvalidArgument, "--model is required for " + o.command);
    return in;
  }
  in.model = load_model_file(o.model);
  in.sigma = o.cocycle.empty() ? TwoCocycle::trivial(in.model) : load_cocycle_file(o.cocycle, in.model);
  for (const auto& path : o.elements) in.elements.push_back(load_element_file(path, in.model));
  return in;
}

void require_elements(const Inputs& in, const Options& o, std::size_t n) {
  if (in.elements.size() != n) {
    throw Error(ErrorKind::InvalidArgument, o.command + " takes exactly " + std::to_string(n) + " --element file" +
                                                (n == 1 ? "" : "s"));
  }
}

ojson parsed(const std::string& text) { return ojson::parse(text); }

ojson model_record(const GroupoidModel& m) {
  ojson o;
  o["kind"] = to_string(m.kind());
  o["description"] = m.describe();
  if (m.is_finite()) {
    o["units"] = m.units().size();
    o["arrows"] = m.arrows().size();
  } else if (m.has_finite_unit_space()) {
    o["units"] = m.units().size();
    o["arrows"] = "infinite";
  } else {
    o["units"] = "infinite";
    o["arrows"] = "infinite";
  }
  return o;
}

ojson abs_sum_record(const AbsSum& s) {
  ojson terms = ojson::array();
  for (const auto& c : s.squared_terms()) terms.push_back(c.to_string());
  return terms;
}

std::vector<Unit> sample_units(const GroupoidModel& m, const Options& o) {
  if (m.has_finite_unit_space()) {
    auto units = m.units();
    if (o.samples > 0 && o.samples < units.size()) units.resize(o.samples);
    return units;
  }
  const auto& cyl = dynamic_cast<const CylinderShiftGroupoid&>(m);
  const auto& x = cyl.subshift();
  const std::size_t count = o.samples > 0 ? o.samples : 4;
  const auto radius = static_cast<std::int64_t>(o.depth);
  std::mt19937_64 rng(o.seed);
  std::vector<Unit> out;
  for (int attempt = 0; out.size() < count && attempt < 1000; ++attempt) {
    Cylinder c;
    for (std::int64_t p = -radius; p <= radius; ++p)
      c.symbols.emplace(p, static_cast<Symbol>(rng() % static_cast<std::uint64_t>(x.alphabet())));
    if (auto p = x.complete(c, -radius, radius)) out.emplace_back(*p);
  }
  if (out.empty()) {
    if (auto p = x.complete(Cylinder{}, 0, 0)) out.emplace_back(*p);
  }
  return out;
}

Report validate(const Options& o) {
  auto in = load(o);
  Report r;
  r.data["model"] = model_record(*in.model);
  r.line("model: " + in.model->describe());
  const auto rep = check_cocycle(*in.sigma, o.depth);
  ojson c;
  c["kind"] = to_string(in.sigma->kind());
  c["description"] = in.sigma->describe();
  c["valid"] = rep.valid;
  c["exhaustive"] = rep.exhaustive;
  c["pairs_checked"] = rep.pairs_checked;
  c["triples_checked"] = rep.triples_checked;
  if (!rep.valid) {
    c["witness"] = rep.witness;
    c["message"] = rep.message;
  }
  r.data["cocycle"] = c;
  r.line("cocycle: " + in.sigma->describe() + " - " + (rep.valid ? "valid" : "INVALID") + " (" +
         (rep.exhaustive ? "exhaustive" : "sampled") + ", " + std::to_string(rep.triples_checked) + " triples)");
  if (!rep.valid) {
    r.line("witness: " + rep.witness);
    r.exit_code = kValidation;
  }
  ojson els = ojson::array();
  for (std::size_t i = 0; i < in.elements.size(); ++i) {
    const auto& e = in.elements[i];
    ojson x;
    x["file"] = o.elements[i];
    x["terms"] = e.is_exact ? e.exact.size() : e.numeric.size();
    x["exact"] = e.is_exact;
    els.push_back(x);
    r.line("element " + o.elements[i] + ": " + std::to_string(e.numeric.size()) + " terms, " +
           (e.is_exact ? "exact" : "floating"));
  }
  r.data["elements"] = els;
  r.data["valid"] = rep.valid;
  return r;
}

Report conv(const Options& o) {
  auto in = load(o);
  require_elements(in, o, 2);
  Report r;
  const auto& f = in.elements[0];
  const auto& g = in.elements[1];
  if (f.is_exact && g.is_exact) {
    auto h = convolve(*in.sigma, f.exact, g.exact);
    r.data["exact"] = true;
    r.data["result"] = parsed(serialize_element(h));
    r.line(h.to_string());
  } else {
    auto h = convolve(*in.sigma, f.numeric, g.numeric);
    r.data["exact"] = false;
    r.data["result"] = parsed(serialize_element(h));
    r.line(h.to_string());
  }
  return r;
}

Report involve_cmd(const Options& o) {
  auto in = load(o);
  require_elements(in, o, 1);
  Report r;
  const auto& f = in.elements[0];
  if (f.is_exact) {
    auto h = involve(*in.sigma, f.exact);
    r.data["exact"] = true;
    r.data["result"] = parsed(serialize_element(h));
    r.line(h.to_string());
  } else {
    auto h = involve(*in.sigma, f.numeric);
    r.data["exact"] = false;
    r.data["result"] = parsed(serialize_element(h));
    r.line(h.to_string());
  }
  return r;
}

Report norm(const Options& o) {
  auto in = load(o);
  if (in.elements.empty()) throw Error(ErrorKind::InvalidArgument, "norm needs at least one --element");
  Report r;
  ojson list = ojson::array();
  for (std::size_t i = 0; i < in.elements.size(); ++i) {
    const auto& e = in.elements[i];
    ojson x;
    x["file"] = o.elements[i];
    if (e.is_exact) {
      auto v = i_norm(e.exact);
      x["i_norm"] = v.value;
      x["exact"] = true;
      x["sqrt_terms"] = abs_sum_record(v.exact);
      if (v.attained_at) x["attained_at"] = parsed(unit_to_json(*v.attained_at));
      r.line(o.elements[i] + ": I-norm " + fmt(v.value) +
             (v.attained_at ? " attained at " + to_string(*v.attained_at) : std::string()));
    } else {
      const double v = i_norm(e.numeric);
      x["i_norm"] = v;
      x["exact"] = false;
      r.line(o.elements[i] + ": I-norm " + fmt(v));
    }
    list.push_back(x);
  }
  r.data["norms"] = list;
  return r;
}

Report reduced_norm(const Options& o) {
  auto in = load(o);
  require_elements(in, o, 1);
  const auto& e = in.elements[0];
  if (!e.is_exact) throw Error(ErrorKind::InvalidArgument, "reduced-norm needs an exact element");
  OperatorNormOptions opt;
  opt.tol = o.tol;
  opt.seed = o.seed;
  const auto units = sample_units(*in.model, o);
  auto est = reduced_norm_estimate(*in.sigma, e.exact, units, o.truncation, opt);
  Report r;
  r.data["lower"] = est.lower;
  r.data["upper"] = est.upper;
  r.data["upper_sqrt_terms"] = abs_sum_record(est.upper_exact);
  r.data["truncation"] = est.truncation;
  r.data["tol"] = est.tol;
  ojson us = ojson::array();
  for (const auto& u : est.units) {
    ojson x;
    x["unit"] = parsed(unit_to_json(u.unit));
    x["norm"] = u.value;
    x["basis_size"] = u.basis_size;
    x["truncated"] = u.truncated;
    us.push_back(x);
  }
  r.data["units"] = us;
  r.line("reduced norm in [" + fmt(est.lower) + ", " + fmt(est.upper) + "] (truncation " +
         std::to_string(est.truncation) + ", " + std::to_string(est.units.size()) + " units)");
  return r;
}

Report decompose(const Options& o) {
  auto in = load(o);
  DecomposeOptions opt;
  opt.seed = o.seed;
  auto b = decompose_finite_cstar(*in.sigma, opt);
  Report r;
  ojson blocks = ojson::array();
  std::string dims;
  for (const auto& x : b.blocks) {
    ojson j;
    j["dimension"] = x.dimension;
    j["multiplicity"] = x.multiplicity;
    blocks.push_back(j);
    dims += (dims.empty() ? "" : ", ") + std::to_string(x.dimension) + "x" + std::to_string(x.dimension);
  }
  r.data["algebra_dimension"] = b.algebra_dimension;
  r.data["center_dimension"] = b.center_dimension;
  r.data["blocks"] = blocks;
  r.data["threshold"] = b.threshold;
  r.data["largest_below"] = number(b.largest_below);
  r.data["smallest_above"] = number(b.smallest_above);
  r.data["separation_above"] = number(b.separation_above);
  r.data["separation_below"] = number(b.separation_below);
  r.line("algebra dimension " + std::to_string(b.algebra_dimension) + ", center dimension " +
         std::to_string(b.center_dimension));
  r.line("blocks: " + dims);
  r.line("rank threshold " + fmt(b.threshold) + ", gap [" + fmt(b.largest_below) + ", " + fmt(b.smallest_above) + "]");
  return r;
}

Report principal(const Options& o) {
  auto in = load(o);
  auto v = is_topologically_principal(*in.model, o.depth);
  Report r;
  r.data["verdict"] = to_string(v.verdict);
  r.data["depth"] = v.depth;
  r.data["witness"] = v.witness;
  r.line("topologically principal: " + to_string(v.verdict) + " (depth " + std::to_string(v.depth) + ")");
  if (!v.witness.empty()) r.line("witness: " + v.witness);
  if (v.verdict == Verdict::Unknown) r.exit_code = kInconclusive;
  return r;
}

Report analyze_cmd(const Options& o) {
  auto in = load(o);
  auto v = analyze(*in.sigma, o.depth);
  Report r;
  r.data["outcome"] = to_string(v.outcome);
  if (v.outcome == Outcome::CStarUnique) r.data["route"] = v.route;
  else r.data["reason"] = v.reason;
  r.data["depth"] = o.depth;
  ojson chain = ojson::array();
  r.line("outcome: " + to_string(v.outcome) + (v.route.empty() ? "" : " via " + v.route));
  if (!v.reason.empty()) r.line("reason: " + v.reason);
  for (const auto& s : v.chain) {
    ojson j;
    j["id"] = s.id;
    j["statement"] = s.statement;
    j["evidence"] = s.evidence;
    j["provenance"] = to_string(s.provenance);
    chain.push_back(j);
    r.line("  [" + s.id + "] " + s.statement + " -- " + s.evidence + " (" + to_string(s.provenance) + ")");
  }
  r.data["chain"] = chain;
  if (v.outcome == Outcome::Inconclusive) r.exit_code = kInconclusive;
  return r;
}

}  // namespace

Report run_command(const Options& o) {
  Report r;
  if (o.command == "validate") r = validate(o);
  else if (o.command == "conv") r = conv(o);
  else if (o.command == "involve") r = involve_cmd(o);
  else if (o.command == "norm") r = norm(o);
  else if (o.command == "reduced-norm") r = reduced_norm(o);
  else if (o.command == "decompose") r = decompose(o);
  else if (o.command == "principal") r = principal(o);
  else if (o.command == "analyze") r = analyze_cmd(o);
  else throw Error(ErrorKind::InvalidArgument, "unknown command '" + o.command + "'");
  ojson head;
  head["format_version"] = kFormatVersion;
  head["command"] = o.command;
  for (const auto& [k, v] : r.data.items()) head[k] = v;
  r.data = std::move(head);
  return r;
}

}  // namespace etale::cli
