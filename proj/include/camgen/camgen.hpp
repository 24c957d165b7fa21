// Copyright 2026 The camgen authors
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

#include "camgen/error.hpp"
#include "camgen/fitting.hpp"
#include "camgen/generation.hpp"
#include "camgen/metrics.hpp"
#include "camgen/model.hpp"
#include "camgen/model_io.hpp"
#include "camgen/presets.hpp"
#include "camgen/report_io.hpp"
#include "camgen/trace.hpp"
