#include "parisi/serialize.hpp"

namespace parisi {

namespace {

Json optional_value(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const ParisiMeasure& nu) {
  Json segs = Json::array();
  for (const Segment& s : nu.segments()) {
    Json e{{"lo", s.lo}, {"hi", s.hi}, {"kind", to_string(s.kind)}};
    if (s.kind == SegmentKind::Constant) e["value"] = s.value;
    segs.push_back(std::move(e));
  }
  return Json{{"segments", std::move(segs)}, {"atom", nu.atom()}};
}

Json to_json(const VerificationReport& r) {
  return Json{{"normalization_error", r.normalization_error},
              {"min_g", r.min_g},
              {"argmin_g", r.argmin_g},
              {"support_residual", r.support_residual},
              {"tolerance", r.tolerance},
              {"pass", r.pass}};
}

Json to_json(const Classification& c) {
  const PhaseParams& pp = c.params;
  Json params{{"z", optional_value(pp.z)},   {"q", optional_value(pp.q)},   {"z1", optional_value(pp.z1)},
              {"z2", optional_value(pp.z2)}, {"q1", optional_value(pp.q1)}, {"q2", optional_value(pp.q2)},
              {"qP", optional_value(pp.qP)}};
  Json j{{"p", c.p},
         {"s", c.s},
         {"lambda", c.lambda},
         {"phase", to_string(c.phase)},
         {"params", std::move(params)},
         {"variant", c.variant ? Json(to_string(*c.variant)) : Json(nullptr)},
         {"on_boundary", c.on_boundary},
         {"low_s_unproven", c.low_s_unproven},
         {"interval_phase", to_string(c.interval)},
         {"interval_agrees", c.interval_agrees},
         {"max_zeta", optional_value(c.max_zeta)},
         {"energy", c.energy},
         {"measure", to_json(c.measure)},
         {"report", to_json(c.report)}};
  return j;
}

Json to_json(const PhaseBoundaries& b) {
  const Regime& r = b.regime;
  Json regime{{"tag", to_string(r.tag)},
              {"discriminant", optional_value(r.discriminant)},
              {"shortcut_discriminant", optional_value(r.shortcut_discriminant)},
              {"lambda1_star", optional_value(r.lambda1_star)},
              {"lambda2_star", optional_value(r.lambda2_star)},
              {"lambda_2to1F", optional_value(r.lambda_2to1F)},
              {"lambda_2to1F_prime", optional_value(r.lambda_2to1F_prime)},
              {"psi_lambda1_star", optional_value(r.psi_lambda1_star)},
              {"psi_lambda_2to1F", optional_value(r.psi_lambda_2to1F)}};
  Json list = Json::array();
  for (const auto& [name, value] : b.list()) {
    Json e{{"name", name}, {"lambda", value}};
    if (b.p2 && name == "lambda_1to1F") e["residual"] = b.p2->residual_1to1F;
    if (b.general) {
      const GeneralBoundaries& g = *b.general;
      if (name == "lambda_1to2") {
        e["x"] = g.x_1to2;
        e["residual"] = g.residual_1to2;
      } else if (name == "lambda_2to2F") {
        e["x"] = optional_value(g.x_2to2F);
        e["residual"] = optional_value(g.residual_2to2F);
      } else if (name == "lambda_2to1") {
        e["residual"] = g.residual_2to1;
      }
    }
    list.push_back(std::move(e));
  }
  Json j{{"p", b.p}, {"s", b.s}, {"regime", std::move(regime)}, {"boundaries", std::move(list)},
         {"low_s_unproven", b.low_s_unproven}};
  if (b.general) j["lambda_psi_below"] = optional_value(b.general->lambda_psi_below);
  return j;
}

Json to_json(const OracleProfile& prof) {
  Json levels = Json::array();
  for (std::size_t k = 0; k < prof.levels.size(); ++k) {
    const OracleResult& r = prof.levels[k];
    Json jumps = Json::array();
    for (const Jump& jp : r.measure.jumps) jumps.push_back(Json{{"q", jp.q}, {"a", jp.a}});
    levels.push_back(Json{{"k", k}, {"energy", r.energy}, {"jumps", std::move(jumps)}, {"atom", r.measure.atom}});
  }
  return Json{{"levels", std::move(levels)},
              {"saturation", prof.saturation < 0 ? Json(nullptr) : Json(prof.saturation)},
              {"tag", prof.tag()}};
}

namespace {

double number(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) throw InvalidMeasure(std::string("measure field '") + key + "' missing or not a number");
  return j[key].get<double>();
}

}  // namespace

ParisiMeasure measure_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidMeasure("measure must be a JSON object");
  if (j.contains("measure") && !j.contains("segments")) return measure_from_json(j["measure"]);
  if (!j.contains("segments") || !j["segments"].is_array()) throw InvalidMeasure("measure needs a 'segments' array");
  std::vector<Segment> segs;
  for (const Json& e : j["segments"]) {
    if (!e.is_object()) throw InvalidMeasure("segment must be an object");
    if (!e.contains("kind") || !e["kind"].is_string()) throw InvalidMeasure("segment needs a 'kind'");
    std::string kind = e["kind"].get<std::string>();
    Segment s{number(e, "lo"), number(e, "hi"), SegmentKind::Constant, 0.0};
    if (kind == "constant") {
      s.value = number(e, "value");
    } else if (kind == "full") {
      s.kind = SegmentKind::Full;
    } else {
      throw InvalidMeasure("unknown segment kind '" + kind + "'");
    }
    segs.push_back(s);
  }
  return ParisiMeasure(std::move(segs), number(j, "atom"));
}

ParisiMeasure parse_measure(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw InvalidMeasure("measure file is not valid JSON");
  return measure_from_json(j);
}

}  // namespace parisi
