#ifndef GLIAISON_JSONIO_HPP
#define GLIAISON_JSONIO_HPP

#include <json.hpp>

#include "gliaison/descent.hpp"

namespace gliaison {

using nlohmann::json;

json ideal_to_json(const Ideal& I);
json betti_to_json(const BettiTable& t);
json hf_to_json(const std::map<int, long>& hf);
json classification_to_json(const Classification& c);
json link_check_to_json(const LinkCheck& c);
json flm_to_json(const FiniteLengthModule& m);
json matrix_to_json(const GradedMatrix& M);
json resolution_to_json(const FreeResolution& res);
json ideal_resolution_to_json(const ResolutionOfIdeal& res);
json decomposition_to_json(const MCMDecomposition& d);
json even_class_to_json(const EvenClassReport& r);

// liaison traces: self-contained files carrying the ring, the ambient and
// every step; replay re-runs the per-step verification
json trace_to_json(const LiaisonTrace& t, const Ideal& final_ideal,
                   bool reached_ci, uint64_t seed);

struct ReplayResult {
  bool ok = false;
  std::string why;
};
ReplayResult replay_trace_json(const json& j);

}  // namespace gliaison

#endif
