// Copyright 2026 The spokenvec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef SPOKENVEC_CLI_GRADCHECK_HPP_
#define SPOKENVEC_CLI_GRADCHECK_HPP_

#include <cstdint>
#include <vector>

#include "spokenvec/features.hpp"
#include "spokenvec/model.hpp"
#include "spokenvec/seq2seq.hpp"

namespace spokenvec::cli {

struct GradcheckOptions {
  nn::ModelConfig model{3, 6, 2};
  int k = 2;
  int max_length = 4;
  double epsilon = 1e-5;
};

// A seeded tiny model with one center segment and 2k targets, each of a
// random length in [1, max_length] with standard normal frames.
struct GradcheckInstance {
  nn::ModelParams<double> params;
  FeatureSequence center;
  std::vector<FeatureSequence> targets;

  nn::ExampleView view() const;
};

GradcheckInstance make_gradcheck_instance(const GradcheckOptions& options,
                                          std::uint64_t seed);

// Central-difference check of every parameter. `perturb` corrupts the
// analytic gradient of the first parameter so that its relative error
// exceeds 0.8.
nn::FiniteDifferenceReport run_gradcheck(const GradcheckInstance& instance,
                                         double epsilon, bool perturb = false);

}  // namespace spokenvec::cli

#endif  // SPOKENVEC_CLI_GRADCHECK_HPP_
