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


#include "spokenvec/cli/gradcheck.hpp"

#include <cmath>
#include <random>

namespace spokenvec::cli {

nn::ExampleView GradcheckInstance::view() const {
  nn::ExampleView v;
  v.center = &center;
  for (const auto& t : targets) v.targets.push_back(&t);
  return v;
}

GradcheckInstance make_gradcheck_instance(const GradcheckOptions& options,
                                          std::uint64_t seed) {
  GradcheckInstance inst{nn::init_params<double>(options.model, seed), {}, {}};
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<int> length(1, options.max_length);
  auto sequence = [&] {
    FeatureSequence s;
    s.frames = FeatureMatrix(length(rng), options.model.input_dim);
    for (Eigen::Index i = 0; i < s.frames.size(); ++i) s.frames.data()[i] = gauss(rng);
    return s;
  };
  inst.center = sequence();
  for (int i = 0; i < 2 * options.k; ++i) inst.targets.push_back(sequence());
  return inst;
}

nn::FiniteDifferenceReport run_gradcheck(const GradcheckInstance& instance,
                                         double epsilon, bool perturb) {
  const auto view = instance.view();
  auto analytic = nn::skipgram_gradient(instance.params, view).gradient;
  if (perturb) analytic(0) += 1.0 + 10.0 * std::abs(analytic(0));
  return nn::finite_difference_check(instance.params, view, epsilon, analytic);
}

}  // namespace spokenvec::cli
