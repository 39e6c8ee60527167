// Copyright 2026 The cornerescape Authors
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

// The clip catalog shipped in data/clip_catalog.json, compiled in.

#ifndef CORNERESCAPE_CLIP_CATALOG_HPP
#define CORNERESCAPE_CLIP_CATALOG_HPP

#include <string_view>
#include <vector>

#include <json.hpp>

#include "cornerescape/clip_catalog_data.hpp"
#include "cornerescape/toolkit.hpp"

namespace cornerescape {

inline const std::vector<ClipSpec>& clip_catalog() {
  static const std::vector<ClipSpec> cat =
      decode_clip_catalog(nlohmann::json::parse(detail::kClipCatalogJson));
  return cat;
}

inline const ClipSpec& clip_named(std::string_view name) {
  for (const ClipSpec& c : clip_catalog())
    if (c.name == name) return c;
  throw Error(ErrorCode::kInvalidArgument,
              "no clip named " + std::string(name));
}

/// Catalog clips of the given kind anchored at {a, b}, in catalog order.
inline std::vector<const ClipSpec*> clips_anchored(Vertex a, Vertex b,
                                                   ClipKind kind) {
  std::vector<const ClipSpec*> out;
  for (const ClipSpec& c : clip_catalog())
    if (c.kind == kind &&
        ((c.u == a && c.v == b) || (c.u == b && c.v == a)))
      out.push_back(&c);
  return out;
}

}  // namespace cornerescape

#endif  // CORNERESCAPE_CLIP_CATALOG_HPP
