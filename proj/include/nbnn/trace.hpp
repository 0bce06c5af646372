#pragma once

#include <string>

#include "nbnn/classify.hpp"
#include "nbnn/episodes.hpp"

namespace nbnn {

// JSON export of one query image's classification: the selected pairs with
// class provenance, the fallback flag, the prediction and the per-class
// scores. Pairs mirror the engine's SelectionResult exactly.
std::string selection_trace_json(const Classification& result, const SupportPool& pool,
                                 Method method, ScoreRule rule, const std::string& query_id);

// JSON serialization of an evaluation report. Timing lives under the
// top-level "timing" key so determinism comparisons can strip it.
std::string eval_report_json(const EvalReport& report);

}  // namespace nbnn
