#include "resvol/indices.hpp"

#include <string>

#include "resvol/error.hpp"
#include "text_util.hpp"

namespace resvol {

std::string_view index_name(IndexKind kind) {
    switch (kind) {
        case IndexKind::Ndwi: return "NDWI";
        case IndexKind::AweiNsh: return "AWEINSH";
        case IndexKind::Wcwi: return "WCWI";
    }
    return "?";
}

std::optional<IndexKind> parse_index_kind(std::string_view name) {
    const auto n = detail::lower(name);
    for (auto k : {IndexKind::Ndwi, IndexKind::AweiNsh, IndexKind::Wcwi}) {
        if (detail::lower(index_name(k)) == n) return k;
    }
    return std::nullopt;
}

std::optional<double> ndwi_value(double green, double nir) {
    const double denom = green + nir;
    if (denom == 0.0) return std::nullopt;
    return (green - nir) / denom;
}

double aweinsh_value(double green, double nir, double swir1, double swir2) {
    return 4.0 * (green - swir1) - (0.25 * nir + 2.75 * swir2);
}

std::optional<double> wcwi_value(double green, double nir, double swir1, double swir2) {
    auto nd = ndwi_value(green, nir);
    if (!nd) return std::nullopt;
    return 0.8 * aweinsh_value(green, nir, swir1, swir2) + 0.2 * *nd;
}

namespace {

IndexRaster blank(const Scene& scene, IndexKind kind) {
    IndexRaster out;
    out.kind = kind;
    out.shape = scene.shape();
    out.values.assign(out.shape.size(), 0.0);
    out.valid_mask = Mask(out.shape, 0);
    return out;
}

void require_swir(const Scene& scene, IndexKind kind) {
    if (!scene.sensor.has_swir() || !scene.has_band(BandRole::Swir1) || !scene.has_band(BandRole::Swir2)) {
        throw UnsupportedIndexError(std::string(index_name(kind)) + " needs SWIR1/SWIR2, sensor " +
                                    scene.sensor.sensor_id + " has none");
    }
}

}  // namespace

IndexRaster ndwi(const Scene& scene) {
    const auto& g = scene.band(BandRole::Green).values;
    const auto& n = scene.band(BandRole::Nir).values;
    auto out = blank(scene, IndexKind::Ndwi);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (!scene.valid_mask[i]) continue;
        if (auto v = ndwi_value(g[i], n[i])) {
            out.values[i] = *v;
            out.valid_mask[i] = 1;
        }
    }
    return out;
}

IndexRaster aweinsh(const Scene& scene) {
    require_swir(scene, IndexKind::AweiNsh);
    const auto& g = scene.band(BandRole::Green).values;
    const auto& n = scene.band(BandRole::Nir).values;
    const auto& s1 = scene.band(BandRole::Swir1).values;
    const auto& s2 = scene.band(BandRole::Swir2).values;
    auto out = blank(scene, IndexKind::AweiNsh);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (!scene.valid_mask[i]) continue;
        out.values[i] = aweinsh_value(g[i], n[i], s1[i], s2[i]);
        out.valid_mask[i] = 1;
    }
    return out;
}

IndexRaster wcwi(const Scene& scene) {
    require_swir(scene, IndexKind::Wcwi);
    const auto& g = scene.band(BandRole::Green).values;
    const auto& n = scene.band(BandRole::Nir).values;
    const auto& s1 = scene.band(BandRole::Swir1).values;
    const auto& s2 = scene.band(BandRole::Swir2).values;
    auto out = blank(scene, IndexKind::Wcwi);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (!scene.valid_mask[i]) continue;
        if (auto v = wcwi_value(g[i], n[i], s1[i], s2[i])) {
            out.values[i] = *v;
            out.valid_mask[i] = 1;
        }
    }
    return out;
}

IndexRaster compute_index(const Scene& scene, IndexKind kind) {
    switch (kind) {
        case IndexKind::Ndwi: return ndwi(scene);
        case IndexKind::AweiNsh: return aweinsh(scene);
        case IndexKind::Wcwi: return wcwi(scene);
    }
    throw UnsupportedIndexError("unknown index kind");
}

BandGrid index_to_grid(const IndexRaster& index, double nodata_value) {
    BandGrid g;
    g.shape = index.shape;
    g.nodata_value = nodata_value;
    g.values.resize(index.values.size());
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        g.values[i] = index.valid_mask[i] ? index.values[i] : nodata_value;
    }
    return g;
}

}  // namespace resvol
