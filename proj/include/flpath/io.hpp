#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "flpath/path.hpp"

namespace flpath::io {

using json = nlohmann::json;

// Exact scalars serialize as a plain integer when the denominator is 1 and
// as a [numerator, denominator] pair otherwise. Node indices, super-node
// ids and breakpoint indices are 1-based in documents and CSV; the C++ API
// is 0-based throughout.

inline json rational_to_json(const Rational& r) {
  if (r.is_integer()) return json(r.num());
  return json::array({r.num(), r.den()});
}

inline Rational rational_from_json(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer())
    return Rational(j[0].get<std::int64_t>(), j[1].get<std::int64_t>());
  throw ParseError(where + ": expected integer or [numerator, denominator]");
}

// ---------------------------------------------------------------------------
// Instance documents
// ---------------------------------------------------------------------------

/// One loss in an instance document. `pwl` is the compiled form; `abs`,
/// `quantile` and `convex_grid` are the application families that compile
/// down to it. All loss values are multiplied by the document's integer
/// `scale` (breakpoints are not; they live on the x axis), which is how
/// fractional weights such as quantile tau become exact integers.
struct LossDescriptor {
  enum class Kind { pwl, abs, quantile, convex_grid };

  Kind kind = Kind::pwl;
  std::vector<Rational> breakpoints;  // pwl
  std::vector<Rational> slopes;       // pwl
  Rational offset;                    // pwl
  Rational a;                         // abs, quantile
  Rational weight;                    // abs
  Rational tau;                       // quantile
  Rational l, u, eps, big_m;          // convex_grid
  std::vector<Rational> samples;      // convex_grid

  friend bool operator==(const LossDescriptor&, const LossDescriptor&) = default;
};

struct InstanceDocument {
  std::int64_t scale = 1;
  std::vector<LossDescriptor> losses;

  friend bool operator==(const InstanceDocument&, const InstanceDocument&) = default;
};

inline json to_json(const InstanceDocument& doc) {
  json losses = json::array();
  for (const LossDescriptor& d : doc.losses) {
    json body;
    const char* key = nullptr;
    switch (d.kind) {
      case LossDescriptor::Kind::pwl: {
        key = "pwl";
        json bps = json::array();
        for (const Rational& b : d.breakpoints) bps.push_back(rational_to_json(b));
        json slopes = json::array();
        for (const Rational& s : d.slopes) slopes.push_back(rational_to_json(s));
        body = {{"breakpoints", bps}, {"slopes", slopes}, {"offset", rational_to_json(d.offset)}};
        break;
      }
      case LossDescriptor::Kind::abs:
        key = "abs";
        body = {{"a", rational_to_json(d.a)}, {"weight", rational_to_json(d.weight)}};
        break;
      case LossDescriptor::Kind::quantile:
        key = "quantile";
        body = {{"a", rational_to_json(d.a)}, {"tau", rational_to_json(d.tau)}};
        break;
      case LossDescriptor::Kind::convex_grid: {
        key = "convex_grid";
        json samples = json::array();
        for (const Rational& s : d.samples) samples.push_back(rational_to_json(s));
        body = {{"l", rational_to_json(d.l)},
                {"u", rational_to_json(d.u)},
                {"eps", rational_to_json(d.eps)},
                {"M", rational_to_json(d.big_m)},
                {"samples", samples}};
        break;
      }
    }
    losses.push_back(json{{key, body}});
  }
  return json{{"scale", doc.scale}, {"losses", losses}};
}

inline std::vector<Rational> rational_list_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  std::vector<Rational> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(rational_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline const json& require_field(const json& j, const char* field, const std::string& where) {
  const auto it = j.find(field);
  if (it == j.end()) throw ParseError(where + ": missing field '" + field + "'");
  return *it;
}

inline InstanceDocument instance_document_from_json(const json& root) {
  if (!root.is_object()) throw ParseError("instance: expected a JSON object");
  InstanceDocument doc;
  if (const auto it = root.find("scale"); it != root.end()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() <= 0)
      throw ParseError("instance.scale: expected a positive integer");
    doc.scale = it->get<std::int64_t>();
  }
  const json& losses = require_field(root, "losses", "instance");
  if (!losses.is_array() || losses.empty())
    throw ParseError("instance.losses: expected a non-empty array");
  for (std::size_t i = 0; i < losses.size(); ++i) {
    const std::string where = "instance.losses[" + std::to_string(i) + "]";
    const json& entry = losses[i];
    if (!entry.is_object() || entry.size() != 1)
      throw ParseError(where + ": expected exactly one of pwl/abs/quantile/convex_grid");
    LossDescriptor d;
    if (entry.contains("pwl")) {
      const json& body = entry["pwl"];
      d.kind = LossDescriptor::Kind::pwl;
      d.breakpoints = rational_list_from_json(require_field(body, "breakpoints", where),
                                              where + ".breakpoints");
      d.slopes = rational_list_from_json(require_field(body, "slopes", where), where + ".slopes");
      d.offset = body.contains("offset") ? rational_from_json(body["offset"], where + ".offset")
                                         : Rational(0);
    } else if (entry.contains("abs")) {
      const json& body = entry["abs"];
      d.kind = LossDescriptor::Kind::abs;
      d.a = rational_from_json(require_field(body, "a", where), where + ".a");
      d.weight = rational_from_json(require_field(body, "weight", where), where + ".weight");
    } else if (entry.contains("quantile")) {
      const json& body = entry["quantile"];
      d.kind = LossDescriptor::Kind::quantile;
      d.a = rational_from_json(require_field(body, "a", where), where + ".a");
      d.tau = rational_from_json(require_field(body, "tau", where), where + ".tau");
    } else if (entry.contains("convex_grid")) {
      const json& body = entry["convex_grid"];
      d.kind = LossDescriptor::Kind::convex_grid;
      d.l = rational_from_json(require_field(body, "l", where), where + ".l");
      d.u = rational_from_json(require_field(body, "u", where), where + ".u");
      d.eps = rational_from_json(require_field(body, "eps", where), where + ".eps");
      d.big_m = rational_from_json(require_field(body, "M", where), where + ".M");
      d.samples =
          rational_list_from_json(require_field(body, "samples", where), where + ".samples");
    } else {
      throw ParseError(where + ": unknown loss kind");
    }
    doc.losses.push_back(std::move(d));
  }
  return doc;
}

inline InstanceDocument parse_instance_document(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("instance: ") + e.what());
  }
  try {
    return instance_document_from_json(root);
  } catch (const json::exception& e) {
    // Wrong JSON types surface as library type errors; report them as
    // document problems.
    throw ParseError(std::string("instance: ") + e.what());
  }
}

inline ConvexPwl compile_loss(const LossDescriptor& d, std::int64_t scale,
                              const std::string& where) {
  const Rational s(scale);
  switch (d.kind) {
    case LossDescriptor::Kind::pwl: {
      std::vector<Rational> slopes;
      slopes.reserve(d.slopes.size());
      for (const Rational& w : d.slopes) slopes.push_back(w * s);
      return make_pwl(d.breakpoints, std::move(slopes), d.offset * s);
    }
    case LossDescriptor::Kind::abs:
      return make_pwl({d.a}, {-d.weight * s, d.weight * s});
    case LossDescriptor::Kind::quantile:
      return make_pwl({d.a}, {-(Rational(1) - d.tau) * s, d.tau * s});
    case LossDescriptor::Kind::convex_grid: {
      if (!(Rational(0) < d.eps)) throw InvalidEps(where + ": eps must be positive");
      if (!(d.l < d.u)) throw ParseError(where + ": need l < u");
      const Rational steps_exact = (d.u - d.l) / d.eps;
      if (!steps_exact.is_integer())
        throw ParseError(where + ": (u - l) / eps must be an integer for sampled input");
      const std::int64_t steps = steps_exact.num();
      if (d.samples.size() != static_cast<std::size_t>(steps) + 1)
        throw ParseError(where + ": expected " + std::to_string(steps + 1) + " samples, got " +
                         std::to_string(d.samples.size()));
      const auto lookup = [&](const Rational& x) {
        const Rational idx = (x - d.l) / d.eps;
        return d.samples[static_cast<std::size_t>(idx.num())] * s;
      };
      return piecewise_linearize(lookup, d.l, d.u, d.eps, d.big_m);
    }
  }
  throw ParseError(where + ": unknown loss kind");
}

inline ProblemInstance compile(const InstanceDocument& doc) {
  std::vector<ConvexPwl> losses;
  losses.reserve(doc.losses.size());
  for (std::size_t i = 0; i < doc.losses.size(); ++i)
    losses.push_back(
        compile_loss(doc.losses[i], doc.scale, "instance.losses[" + std::to_string(i) + "]"));
  return ProblemInstance(std::move(losses));
}

/// Parse and compile in one step.
inline ProblemInstance parse_instance(const std::string& text) {
  return compile(parse_instance_document(text));
}

/// The compiled form of a document: every loss as an explicit pwl descriptor
/// with scale folded in.
inline InstanceDocument linearized_document(const InstanceDocument& doc) {
  InstanceDocument out;
  out.scale = 1;
  for (std::size_t i = 0; i < doc.losses.size(); ++i) {
    ConvexPwl f =
        compile_loss(doc.losses[i], doc.scale, "instance.losses[" + std::to_string(i) + "]");
    LossDescriptor d;
    d.kind = LossDescriptor::Kind::pwl;
    d.breakpoints = std::move(f.breakpoints);
    d.slopes = std::move(f.slopes);
    d.offset = f.offset;
    out.losses.push_back(std::move(d));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Path documents
// ---------------------------------------------------------------------------

inline json interval_to_json(const LambdaInterval& intv) {
  json j{{"lo", intv.lo}};
  j["hi"] = intv.hi == kLambdaInf ? json() : json(intv.hi);
  return j;
}

inline LambdaInterval interval_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("lo") || !j.contains("hi"))
    throw ParseError(where + ": expected {lo, hi}");
  LambdaInterval intv;
  intv.lo = j["lo"].get<std::int64_t>();
  intv.hi = j["hi"].is_null() ? kLambdaInf : j["hi"].get<std::int64_t>();
  return intv;
}

inline json to_json(const SolutionPath& path) {
  json breakpoints = json::array();
  for (const PathBreakpoint& bp : path.breakpoints)
    breakpoints.push_back(json{{"value", rational_to_json(bp.value)}, {"node", bp.node + 1}});

  json schedule = json::array();
  for (const FusingEntry& entry : path.schedule.entries) {
    json bits = json::array();
    for (const std::uint8_t b : entry.group.bits) bits.push_back(static_cast<int>(b));
    schedule.push_back(json{{"lambda", entry.lambda}, {"group", bits}});
  }

  json segments = json::array();
  for (std::size_t j = 0; j < path.problems.size(); ++j) {
    const ReducedProblem& rp = path.problems[j];
    const ReducedPathScan& scan = path.scans[j];
    json seg{{"lambda_lo", rp.lambda_lo}};
    seg["lambda_hi"] = rp.lambda_hi == kLambdaInf ? json() : json(rp.lambda_hi);
    json tb = json::array();
    for (const int I : rp.to_supernode) tb.push_back(I + 1);
    seg["supernode_of"] = tb;
    json trees = json::array();
    for (const IntervalValueMap& tree : scan.trees) {
      json intervals = json::array();
      for (const auto& entry : tree.entries()) {
        json node = interval_to_json(entry.interval);
        node["value"] = rational_to_json(entry.value);
        intervals.push_back(std::move(node));
      }
      trees.push_back(std::move(intervals));
    }
    seg["trees"] = trees;
    json inserted = json::array();
    for (std::size_t k = 0; k < scan.inserted_at_step.size(); ++k) {
      if (scan.inserted_at_step[k].empty()) continue;
      json intervals = json::array();
      for (const LambdaInterval& intv : scan.inserted_at_step[k])
        intervals.push_back(interval_to_json(intv));
      inserted.push_back(json{{"k", static_cast<std::int64_t>(k) + 1}, {"intervals", intervals}});
    }
    seg["inserted_at_step"] = inserted;
    segments.push_back(std::move(seg));
  }

  return json{{"n", path.node_count},
              {"breakpoints", breakpoints},
              {"schedule", schedule},
              {"segments", segments}};
}

/// Rebuilds a SolutionPath from its document form, revalidating the
/// structural invariants (sorted schedule, consistent super-node tables,
/// disjoint covering trees). Breakpoint provenance is scan-time
/// instrumentation and is not part of the document.
inline SolutionPath path_from_json(const json& root) {
  if (!root.is_object()) throw ParseError("path: expected a JSON object");
  SolutionPath path;
  path.node_count = require_field(root, "n", "path").get<int>();
  if (path.node_count <= 0) throw ParseError("path.n: must be positive");

  const json& breakpoints = require_field(root, "breakpoints", "path");
  for (std::size_t k = 0; k < breakpoints.size(); ++k) {
    const std::string where = "path.breakpoints[" + std::to_string(k) + "]";
    const json& b = breakpoints[k];
    PathBreakpoint bp;
    bp.value = rational_from_json(require_field(b, "value", where), where + ".value");
    bp.node = require_field(b, "node", where).get<int>() - 1;
    if (bp.node < 0 || bp.node >= path.node_count) throw ParseError(where + ".node: out of range");
    if (k > 0 && bp.value < path.breakpoints.back().value)
      throw ParseError(where + ": breakpoint values not sorted");
    path.breakpoints.push_back(std::move(bp));
  }

  const json& schedule = require_field(root, "schedule", "path");
  if (!schedule.is_array() || schedule.empty())
    throw ParseError("path.schedule: expected a non-empty array");
  for (std::size_t j = 0; j < schedule.size(); ++j) {
    const std::string where = "path.schedule[" + std::to_string(j) + "]";
    FusingEntry entry;
    entry.lambda = require_field(schedule[j], "lambda", where).get<std::int64_t>();
    const json& bits = require_field(schedule[j], "group", where);
    if (!bits.is_array() || bits.size() != static_cast<std::size_t>(path.node_count))
      throw ParseError(where + ".group: expected " + std::to_string(path.node_count) + " bits");
    for (const json& b : bits) {
      const int v = b.get<int>();
      if (v != 0 && v != 1) throw ParseError(where + ".group: bits must be 0 or 1");
      entry.group.bits.push_back(static_cast<std::uint8_t>(v));
    }
    if (entry.group.bits.front() != 1) throw ParseError(where + ".group: first bit must be 1");
    if (j == 0 && entry.lambda != 0) throw ParseError("path.schedule[0].lambda: must be 0");
    if (j > 0 && entry.lambda <= path.schedule.entries.back().lambda)
      throw ParseError(where + ".lambda: not strictly increasing");
    path.schedule.entries.push_back(std::move(entry));
  }

  const json& segments = require_field(root, "segments", "path");
  if (!segments.is_array() || segments.size() != schedule.size())
    throw ParseError("path.segments: expected one segment per schedule entry");
  const int p = path.schedule.fusing_value_count();
  for (std::size_t j = 0; j < segments.size(); ++j) {
    const std::string where = "path.segments[" + std::to_string(j) + "]";
    const json& seg = segments[j];
    const std::int64_t next = static_cast<int>(j) < p
                                  ? path.schedule.entries[j + 1].lambda
                                  : kLambdaInf;
    ReducedProblem rp = build_reduced_problem(path.schedule.entries[j].group,
                                              static_cast<int>(j),
                                              path.schedule.entries[j].lambda, next);
    if (require_field(seg, "lambda_lo", where).get<std::int64_t>() != rp.lambda_lo)
      throw ParseError(where + ".lambda_lo: inconsistent with schedule");
    const json& hi = require_field(seg, "lambda_hi", where);
    const std::int64_t hi_value = hi.is_null() ? kLambdaInf : hi.get<std::int64_t>();
    if (hi_value != rp.lambda_hi) throw ParseError(where + ".lambda_hi: inconsistent with schedule");
    const json& tb = require_field(seg, "supernode_of", where);
    if (tb.size() != rp.to_supernode.size())
      throw ParseError(where + ".supernode_of: wrong length");
    for (std::size_t i = 0; i < tb.size(); ++i)
      if (tb[i].get<int>() != rp.to_supernode[i] + 1)
        throw ParseError(where + ".supernode_of: inconsistent with group");

    ReducedPathScan scan;
    scan.sink_intv.assign(static_cast<std::size_t>(rp.supernode_count), LambdaInterval{});
    scan.trees.resize(static_cast<std::size_t>(rp.supernode_count));
    scan.inserted_at_step.resize(path.breakpoints.size());
    const json& trees = require_field(seg, "trees", where);
    if (!trees.is_array() || trees.size() != static_cast<std::size_t>(rp.supernode_count))
      throw ParseError(where + ".trees: expected one tree per super-node");
    for (std::size_t I = 0; I < trees.size(); ++I) {
      const std::string tw = where + ".trees[" + std::to_string(I) + "]";
      std::int64_t expect = rp.lambda_lo;
      for (std::size_t t = 0; t < trees[I].size(); ++t) {
        const json& node = trees[I][t];
        const LambdaInterval intv = interval_from_json(node, tw);
        if (intv.lo != expect) throw ParseError(tw + ": intervals must be adjacent and sorted");
        const Rational value =
            rational_from_json(require_field(node, "value", tw), tw + ".value");
        scan.trees[I].insert(intv, value);
        if (intv.hi == kLambdaInf) {
          expect = kLambdaInf;
          break;
        }
        expect = intv.hi + 1;
      }
      const bool covered = rp.lambda_hi == kLambdaInf ? expect == kLambdaInf
                                                      : expect == rp.lambda_hi + 1;
      if (!covered) throw ParseError(tw + ": intervals do not cover the segment");
    }
    const json& inserted = require_field(seg, "inserted_at_step", where);
    for (const json& entry : inserted) {
      const std::string iw = where + ".inserted_at_step";
      const int k = require_field(entry, "k", iw).get<int>() - 1;
      if (k < 0 || static_cast<std::size_t>(k) >= path.breakpoints.size())
        throw ParseError(iw + ".k: out of range");
      for (const json& ij : require_field(entry, "intervals", iw))
        scan.inserted_at_step[static_cast<std::size_t>(k)].push_back(
            interval_from_json(ij, iw));
    }
    path.problems.push_back(std::move(rp));
    path.scans.push_back(std::move(scan));
  }
  return path;
}

inline SolutionPath parse_path_document(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("path: ") + e.what());
  }
  try {
    return path_from_json(root);
  } catch (const json::exception& e) {
    throw ParseError(std::string("path: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// CSV step tables
// ---------------------------------------------------------------------------

/// Per-node step function of the whole path as CSV rows
/// node,lambda_lo,lambda_hi,value with maximal constant runs merged across
/// segment boundaries; the open end prints as "inf".
inline void write_step_csv(const SolutionPath& path, std::ostream& os) {
  os << "node,lambda_lo,lambda_hi,value\n";
  for (int i = 0; i < path.node_count; ++i) {
    struct Row {
      LambdaInterval intv;
      Rational value;
    };
    std::vector<Row> rows;
    for (std::size_t j = 0; j < path.problems.size(); ++j) {
      const int I = path.problems[j].to_supernode[static_cast<std::size_t>(i)];
      for (const auto& entry : path.scans[j].trees[static_cast<std::size_t>(I)].entries()) {
        if (!rows.empty() && rows.back().value == entry.value &&
            rows.back().intv.hi != kLambdaInf && rows.back().intv.hi + 1 == entry.interval.lo)
          rows.back().intv.hi = entry.interval.hi;
        else
          rows.push_back({entry.interval, entry.value});
      }
    }
    for (const Row& row : rows) {
      os << (i + 1) << ',' << row.intv.lo << ',';
      if (row.intv.hi == kLambdaInf)
        os << "inf";
      else
        os << row.intv.hi;
      os << ',' << row.value.str() << '\n';
    }
  }
}

}  // namespace flpath::io
