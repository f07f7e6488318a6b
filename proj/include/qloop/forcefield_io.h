// Copyright 2026 The qloop Authors
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

#ifndef QLOOP_FORCEFIELD_IO_H
#define QLOOP_FORCEFIELD_IO_H

#include <string>

#include <json.hpp>

#include "qloop/forcefield.h"

namespace qloop {

// Parameter file layout (angles in degrees):
//
//   {
//     "bonds":        [{"i":0,"j":1,"kb":300,"b0":1.33}, ...],
//     "angles":       [{"i":0,"j":1,"k":2,"ktheta":50,"theta0":121.7}, ...],
//     "dihedrals":    [{"i":0,"j":1,"k":2,"l":3,"kphi":0.2,"n":3,"delta":0}, ...],
//     "impropers":    [{"i":0,"j":1,"k":2,"l":3,"komega":10,"omega0":0}, ...],
//     "urey_bradley": [{"i":0,"k":2,"ku":10,"u0":2.45}, ...],
//     "atoms":        [{"epsilon":0.1,"rmin":4.0,"q":0.5}, ...],
//     "dielectric":   1.0,
//     "pair_overrides": [{"i":0,"j":5,"epsilon":0.1,"rmin":3.5}],   (optional)
//     "cutoff": 12.0,                                                (optional)
//     "hard_floor": 1e-6                                             (optional)
//   }
//
// Unknown keys at any level are rejected with a Validation error.

ForceFieldParams params_from_json(const nlohmann::json &doc);
nlohmann::json params_to_json(const ForceFieldParams &params);

ForceFieldParams read_params_file(const std::string &path);

}  // namespace qloop

#endif  // QLOOP_FORCEFIELD_IO_H
