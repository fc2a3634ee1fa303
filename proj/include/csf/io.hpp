#pragma once

#include <string>

#include "csf/breather.hpp"
#include "csf/geometry.hpp"

namespace csf::io {

// Curve file: {"topology": "closed"|"open", "truncated": bool,
//              "points": [[x, y], ...]}.
Curve read_curve(const std::string& path);
void write_curve(const Curve& curve, const std::string& path);

// History file: JSON Lines; header {"topology": ..., "count": N} first, with
// optional "singular_time" and "resample_times", then one {"t": ...,
// "points": [[x, y], ...]} per slice.
FlowHistory read_history(const std::string& path);
void write_history(const FlowHistory& history, const std::string& path);

// Similarity file: {"alpha": ..., "rotation": [[...],[...]], "V": [...],
//                   "shift": ..., "reversed": ..., "residual": ...}.
Similarity read_similarity(const std::string& path);
void write_similarity(const Similarity& s, const std::string& path);

std::string splice_mode_name(SpliceMode mode);
SpliceMode parse_splice_mode(const std::string& name);

// Sidecar: {"mode", "alpha", "rotation", "V", "shift", "reversed",
//           "junctions", "junction_errors", "history"}; the history field
// records where the slices were written.
void write_splice(const SpliceResult& splice, const std::string& history_path,
                  const std::string& sidecar_path);
// Reads the sidecar, then the history it references (tried as written, then
// relative to the sidecar's directory).
SpliceResult read_splice(const std::string& sidecar_path);

}  // namespace csf::io
