#pragma once

#include <string>

#include <json.hpp>

#include "relpair/bell.hpp"
#include "relpair/config.hpp"
#include "relpair/scenario.hpp"

// JSON views of the library's result types. Field names here are load-bearing:
// consistency frames always carry beta, a_event, d_before_partner,
// photon2_label, past_reach, consistent.

namespace relpair {

inline ordered_json event_json(const Event& e) { return {{"x", e.x}, {"ct", e.ct}}; }

inline ordered_json complex_json(const cplx& z) { return {z.real(), z.imag()}; }

inline ordered_json collapse_json(const CollapseRecord& rec) {
  ordered_json out;
  out["d_event"] = event_json(rec.d_event);
  out["b_event"] = event_json(rec.b_event);
  out["basis"] = {{"theta", rec.basis.theta()},
                  {"detected", rec.basis.detected_label()},
                  {"transmitted", rec.basis.transmitted_label()}};
  out["fired"] = rec.fired;
  out["photon1_label"] = rec.photon1_label;
  out["photon2_label"] = rec.photon2_label;
  ordered_json amps = ordered_json::array();
  for (const cplx& a : rec.collapsed.amplitudes()) amps.push_back(complex_json(a));
  out["collapsed_amplitudes"] = amps;  // basis order zz, zy, yz, yy
  return out;
}

inline ordered_json consistency_json(const ConsistencyReport& report) {
  ordered_json out;
  out["policy"] = to_string(report.policy);
  ordered_json frames = ordered_json::array();
  for (const FrameView& view : report.frames) {
    ordered_json f;
    f["beta"] = view.beta;
    f["a_event"] = event_json(view.partner_event);
    f["d_before_partner"] = view.d_before_partner;
    f["photon2_label"] = view.photon2_label;
    f["past_reach"] = view.past_reach;
    f["consistent"] = view.consistent;
    frames.push_back(f);
  }
  out["frames"] = frames;
  ordered_json violations = ordered_json::array();
  for (const Violation& v : report.violations) {
    violations.push_back(
        {{"beta", v.beta}, {"a_event", event_json(v.a_event)}, {"detail", v.detail}});
  }
  out["violations"] = violations;
  out["all_consistent"] = report.all_consistent;
  return out;
}

inline ordered_json past_reach_json(const std::vector<PastReachRow>& rows) {
  ordered_json out = ordered_json::array();
  for (const PastReachRow& row : rows)
    out.push_back({{"beta", row.beta},
                   {"reach", row.reach},
                   {"fraction_of_ct_d", row.fraction_of_ct_d}});
  return out;
}

inline ordered_json second_detector_json(const SecondDetectorResult& res) {
  return {{"probability", res.probability},
          {"fired_sample", res.fired_sample},
          {"e_event", event_json(res.e_event)}};
}

inline ordered_json estimate_json(const ChshEstimate& est) {
  static const char* kPairs[4] = {"a1_b1", "a1_b2", "a2_b1", "a2_b2"};
  ordered_json correlators, counts, std_errors;
  for (int i = 0; i < 4; ++i) {
    correlators[kPairs[i]] = est.correlators[i];
    counts[kPairs[i]] = est.counts[i];
    std_errors[kPairs[i]] = est.std_errors[i];
  }
  return {{"correlators", correlators},
          {"counts", counts},
          {"std_errors", std_errors},
          {"s_value", est.s_value}};
}

/// Shared report skeleton: command name, echoed config, derived audit block.
inline ordered_json report_header(const std::string& command, const Config& cfg) {
  ordered_json out;
  out["schema"] = 1;
  out["command"] = command;
  out["config"] = echo(cfg);
  ordered_json derived;
  derived["x_d"] = cfg.x_d;
  derived["ct_d_nominal"] = cfg.ct_d_nominal();
  ordered_json gammas = ordered_json::array();
  for (double beta : cfg.betas)
    gammas.push_back({{"beta", beta}, {"gamma", Boost(beta).gamma()}});
  derived["gamma"] = gammas;
  out["derived"] = derived;
  return out;
}

}  // namespace relpair
