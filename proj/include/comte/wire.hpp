#pragma once

#include <span>
#include <string>
#include <vector>

#include "comte/classifier.hpp"
#include "comte/core.hpp"

namespace comte::wire {

// Newline-delimited JSON over the child's stdin/stdout.
//
//   -> {"id":0,"op":"handshake","metrics":[...],"length":t}
//   <- {"id":0,"class_names":[...]}
//   -> {"id":n,"op":"predict","metrics":[...],"samples":[[[row 0],...,[row m-1]], ...]}
//   <- {"id":n,"class_names":[...],"probabilities":[[p_0,...,p_k-1], ...]}
//
// A server that cannot answer replies {"id":n,"error":"..."}.

std::string encode_handshake(std::uint64_t id, const MetricSchema& schema);
std::string encode_predict(std::uint64_t id, std::span<const MultivariateSample> samples);

/// Class names from a handshake reply; throws classifier_failure with the raw line attached.
std::vector<std::string> decode_handshake(const std::string& line, std::uint64_t expected_id);

/// Validated (and, within tolerance, renormalized) probability rows.
std::vector<ClassProbabilities> decode_predict(const std::string& line, std::uint64_t expected_id,
                                               std::size_t expected_rows,
                                               const std::vector<std::string>& class_names);

}  // namespace comte::wire

namespace comte {

/// Spawns `command` through /bin/sh, performs the handshake and returns a handle
/// whose calls are serialized over the child's pipes. The child is terminated
/// when the last copy of the handle goes away.
ClassifierHandle external_classifier(const std::string& command, const SchemaPtr& schema);

}  // namespace comte
