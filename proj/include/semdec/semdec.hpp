// Copyright 2026 The semdec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Convenience header pulling in the whole library.

#ifndef SEMDEC_SEMDEC_HPP
#define SEMDEC_SEMDEC_HPP

#include "semdec/affinity.hpp"
#include "semdec/corpus.hpp"
#include "semdec/decoder.hpp"
#include "semdec/eval.hpp"
#include "semdec/extraction.hpp"
#include "semdec/kmeans.hpp"
#include "semdec/lexicon.hpp"
#include "semdec/model.hpp"
#include "semdec/preprocess.hpp"
#include "semdec/synthetic.hpp"
#include "semdec/text_io.hpp"
#include "semdec/unicode.hpp"

#endif  // SEMDEC_SEMDEC_HPP
