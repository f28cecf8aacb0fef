// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The bfa-extract Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#pragma once

#include "bfa/angle_codec.hpp"
#include "bfa/capture_io.hpp"
#include "bfa/core_model.hpp"
#include "bfa/error.hpp"
#include "bfa/frame_codec.hpp"
#include "bfa/givens.hpp"
#include "bfa/output_bundle.hpp"
#include "bfa/session.hpp"
#include "bfa/subcarrier_table.hpp"
