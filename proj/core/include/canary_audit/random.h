//
// Copyright 2026 The Canary Audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef CANARY_AUDIT_RANDOM_H_
#define CANARY_AUDIT_RANDOM_H_

#include <cstdint>
#include <random>

namespace canary_audit {

// SplitMix64 finalizer. Used to derive independent stream keys from
// (seed, stream, index) tuples so that results never depend on the order in
// which trials or samples are generated.
uint64_t MixBits(uint64_t x);

// Derives the key of substream `stream` of generator `seed`.
uint64_t DeriveStreamKey(uint64_t seed, uint64_t stream);

// Counter-based uniform bits: the `index`-th output of the SplitMix64 stream
// starting at `key`. Random access, so sample i never depends on sample i-1.
uint64_t CounterBits(uint64_t key, uint64_t index);

// Maps 64 random bits to a double in [0, 1) with 53 bits of precision.
double UnitInterval(uint64_t bits);

// Maps 64 random bits to a double in (0, 1].
double OpenUnitInterval(uint64_t bits);

// Uniform integer in [0, bound) using Lemire's multiply-and-reject method.
// std::uniform_int_distribution is not bit-identical across standard library
// implementations, so reproducible draws go through this instead.
uint64_t UniformBelow(std::mt19937_64& engine, uint64_t bound);

// Standard normal deviate from the Box-Muller cosine branch applied to the
// two counter outputs (2 * index, 2 * index + 1) of `key`. Fixed forever:
// golden tests pin the outputs.
double CounterNormal(uint64_t key, uint64_t index);

}  // namespace canary_audit

#endif  // CANARY_AUDIT_RANDOM_H_
