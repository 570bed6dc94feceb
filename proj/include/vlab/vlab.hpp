#pragma once

#include "vlab/core.hpp"
#include "vlab/transform.hpp"
#include "vlab/random.hpp"
#include "vlab/kernels.hpp"
#include "vlab/sums.hpp"
#include "vlab/hardy.hpp"
#include "vlab/counterexamples.hpp"
#include "vlab/io.hpp"
#include "vlab/csv.hpp"
#include "vlab/experiments.hpp"
#include "vlab/acceptance.hpp"
