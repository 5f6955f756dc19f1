#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "densedex/corpus_io.hpp"

namespace densedex {

struct FusionConfig {
  size_t depth_in = 1000;   // how deep each source list is read
  size_t depth_out = 1000;  // fused list truncation
};

// Interleaves a1,b1,a2,b2,... through depth_in (a shorter list simply
// exhausts and the other continues), keeps the first occurrence of every
// document, truncates to depth_out. Asymmetric: merge(A,B) != merge(B,A)
// in general. Inputs must be duplicate-free.
std::vector<std::string> alternating_merge(std::span<const std::string> list_a,
                                           std::span<const std::string> list_b,
                                           const FusionConfig& config = {});

// Per-query alternating_merge over two runs. A query present in only one
// run keeps that run's list (filtered and truncated). Fused scores are the
// synthetic 1/rank; rank order is all the merge defines.
Run fuse_runs(const Run& run_a, const Run& run_b, const FusionConfig& config = {});

// Mean over the queries common to both runs of
// |top-n(run_f) intersect top-ref_depth(run_ref)| / |top-n(run_f)|,
// where top-n uses the actual list length when shorter. In [0, 1].
double consistency_factor(const Run& run_f, const Run& run_ref, size_t n,
                          size_t ref_depth = 1000);

}  // namespace densedex
