// Copyright 2026 The opmin Authors.
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

#pragma once

#include "opmin/common.hpp"
#include "opmin/config.hpp"
#include "opmin/corpus.hpp"
#include "opmin/dba.hpp"
#include "opmin/eval.hpp"
#include "opmin/extraction.hpp"
#include "opmin/fba.hpp"
#include "opmin/harness.hpp"
#include "opmin/itemsets.hpp"
#include "opmin/porter.hpp"
#include "opmin/tba.hpp"
#include "opmin/textnorm.hpp"
