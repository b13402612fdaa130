/*
 * Copyright 2026 The qsat Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#ifndef QSAT_QSAT_HPP
#define QSAT_QSAT_HPP

/// \file qsat.hpp
/// Umbrella header: random k-SAT instances, the state-vector kernel,
/// schedules, spectral analysis, classical baselines and the experiment
/// harness.

#include "qsat/baselines.hpp"
#include "qsat/dimacs.hpp"
#include "qsat/eigensolver.hpp"
#include "qsat/errors.hpp"
#include "qsat/experiment.hpp"
#include "qsat/rng.hpp"
#include "qsat/sat.hpp"
#include "qsat/schedule.hpp"
#include "qsat/spectrum.hpp"
#include "qsat/state.hpp"
#include "qsat/stats.hpp"

#endif // QSAT_QSAT_HPP
