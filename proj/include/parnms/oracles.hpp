#pragma once

// Sequential reference implementations. None of these reuse the overlap or
// engine code: the ratio arithmetic is re-derived locally so that agreement
// with the engine is an independent check.

#include <cstddef>
#include <span>

#include "parnms/detections.hpp"
#include "parnms/engine.hpp"

namespace pnms {

/// Direct double loop: d_i survives iff no valid d_j with gate(i, j) has
/// overlap ratio (intersection / (z_j + 1)^2) >= theta.
NmsResult brute_force_nms(const DetectionVector& d, double theta, TieBreak tie_break);

/// Classic sorted greedy NMS with the same asymmetric ratio (denominator is
/// the selected window's area). Ties go to the lowest index. Survivors are
/// reported in input order.
NmsResult greedy_nms(const DetectionVector& d, double theta);

enum class SoftNmsMode { linear, gaussian };

/// Greedy selection order, but overlapping windows are rescored instead of
/// removed: linear s *= (1 - ratio) when ratio >= theta, gaussian
/// s *= exp(-ratio^2 / sigma). Returns the rescored vector in input order.
DetectionVector soft_nms_rescore(const DetectionVector& d, SoftNmsMode mode, double theta, double sigma);

struct AgreementReport {
  std::size_t instances = 0;
  std::size_t exact_matches = 0;
  double jaccard_mean = 0.0;
  std::size_t max_symmetric_diff = 0;
};

/// Jaccard similarity of two survivor multisets; 1.0 when both are empty.
double survivor_jaccard(std::span<const Detection> a, std::span<const Detection> b);
std::size_t survivor_symmetric_difference(std::span<const Detection> a, std::span<const Detection> b);

/// Runs the engine (k = 1, d_max = instance capacity) and greedy_nms on every
/// instance and aggregates how often they agree. Instances are independent
/// and spread over `workers` threads.
AgreementReport compare_methods(std::span<const DetectionVector> instances, double theta,
                                std::size_t workers = 1);

}  // namespace pnms
