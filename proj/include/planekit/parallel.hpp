#pragma once

// Execution policy switch shared by the data-parallel kernels. Every kernel
// that takes an Exec keeps a plain serial loop as its reference path; the
// parallel path must produce identical results regardless of thread count.

namespace planekit {

enum class Exec { Serial, Parallel };

void set_num_threads(int threads);
int num_threads();

}  // namespace planekit
