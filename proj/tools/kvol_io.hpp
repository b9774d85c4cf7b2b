#pragma once

#include "kvol/kvol.hpp"

#include <json.hpp>

namespace kvol::io {

using nlohmann::json;

/// {"exact": "...", "float": ...}
json to_json(const CycloReal& v);
json to_json(const Vec2& v);
json to_json(const Corner& c);
/// {"p": float|"inf", "q": float|"inf"}
json to_json(const HGeodesic& g);
json to_json(const TranslationSurface& s);
json to_json(const TranslationSurface& s, const SaddleConnection& sc);
json to_json(const TranslationSurface& s, const ClosedCurve& c);
json to_json(const KvolReport& r);

}  // namespace kvol::io
