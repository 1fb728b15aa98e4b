#include "textile/volume.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include <json.hpp>

#include "textile/error.hpp"
#include "textile/io.hpp"

namespace textile {

using nlohmann::json;

const char* to_string(SliceAxis axis) noexcept { return axis == SliceAxis::XZ ? "XZ" : "YZ"; }

SliceAxis slice_axis_from_string(const std::string& name) {
    if (name == "XZ" || name == "xz") return SliceAxis::XZ;
    if (name == "YZ" || name == "yz") return SliceAxis::YZ;
    throw DomainError("unknown slice axis '" + name + "' (expected XZ or YZ)");
}

Family sectioned_family(SliceAxis axis) noexcept {
    return axis == SliceAxis::YZ ? Family::Warp : Family::Weft;
}

GridGeometry grid_for_box(const Box& box, double voxel_size_um, double unit_um) {
    if (!(voxel_size_um > 0.0) || !(unit_um > 0.0)) {
        throw DomainError("grid_for_box: voxel size and unit must be > 0");
    }
    if (box.empty()) throw DomainError("grid_for_box: empty box");
    GridGeometry grid;
    grid.voxel_size_um = voxel_size_um;
    grid.spacing = voxel_size_um / unit_um;
    grid.origin = box.min;
    const Vec3 ext = box.extent();
    for (int a = 0; a < 3; ++a) {
        grid.dims[a] = std::max<std::int64_t>(1, std::llround(ext[a] / grid.spacing));
    }
    return grid;
}

std::int64_t slice_count(const GridGeometry& grid, SliceAxis axis) {
    return axis == SliceAxis::XZ ? grid.dims[1] : grid.dims[0];
}

template <typename T>
SliceDataset<T> extract_slices(const Volume<T>& volume, SliceAxis axis) {
    const auto& g = volume.grid;
    SliceDataset<T> ds;
    ds.axis = axis;
    ds.grid = g;
    ds.label_map = volume.label_map;
    const std::int64_t count = slice_count(g, axis);
    const int width = static_cast<int>(axis == SliceAxis::XZ ? g.dims[0] : g.dims[1]);
    const int height = static_cast<int>(g.dims[2]);
    ds.slices.resize(count);
    for (std::int64_t s = 0; s < count; ++s) {
        Slice<T>& slice = ds.slices[s];
        slice.width = width;
        slice.height = height;
        slice.pixels.resize(static_cast<std::size_t>(width) * height);
        for (int v = 0; v < height; ++v) {
            for (int u = 0; u < width; ++u) {
                slice.at(u, v) = axis == SliceAxis::XZ ? volume.at(u, s, v) : volume.at(s, u, v);
            }
        }
    }
    return ds;
}

template <typename T>
Volume<T> restack(const SliceDataset<T>& dataset) {
    Volume<T> volume;
    volume.grid = dataset.grid;
    volume.label_map = dataset.label_map;
    volume.voxels.assign(static_cast<std::size_t>(volume.grid.count()), T{});
    for (std::size_t s = 0; s < dataset.slices.size(); ++s) {
        const auto& slice = dataset.slices[s];
        for (int v = 0; v < slice.height; ++v) {
            for (int u = 0; u < slice.width; ++u) {
                if (dataset.axis == SliceAxis::XZ) {
                    volume.at(u, static_cast<std::int64_t>(s), v) = slice.at(u, v);
                } else {
                    volume.at(static_cast<std::int64_t>(s), u, v) = slice.at(u, v);
                }
            }
        }
    }
    return volume;
}

template SliceDataset<std::uint16_t> extract_slices(const Volume<std::uint16_t>&, SliceAxis);
template SliceDataset<float> extract_slices(const Volume<float>&, SliceAxis);
template Volume<std::uint16_t> restack(const SliceDataset<std::uint16_t>&);
template Volume<float> restack(const SliceDataset<float>&);

std::map<int, std::int64_t> label_histogram(const LabelVolume& volume) {
    std::vector<std::int64_t> counts(65536, 0);
    for (auto v : volume.voxels) ++counts[v];
    std::map<int, std::int64_t> out;
    for (int i = 0; i < 65536; ++i) {
        if (counts[i] > 0) out.emplace(i, counts[i]);
    }
    return out;
}

Vec3 lift_point(const GridGeometry& grid, SliceAxis axis, int slice_index, const Vec2& uv) {
    const double s = slice_index + 0.5;
    const Vec3 local = axis == SliceAxis::XZ ? Vec3(uv.x(), s, uv.y()) : Vec3(s, uv.x(), uv.y());
    return grid.origin + grid.spacing * local;
}

namespace {

constexpr const char* kAxisConvention =
    "X=warp, Y=weft, Z=thickness; voxel (i,j,k) at index i + nx*(j + ny*k)";

json header_json(const GridGeometry& grid, const std::string& dtype, const LabelMap& labels) {
    json h;
    h["dims"] = {grid.dims[0], grid.dims[1], grid.dims[2]};
    h["voxel_size_um"] = grid.voxel_size_um;
    h["dtype"] = dtype;
    h["byte_order"] = "little";
    h["axis_convention"] = kAxisConvention;
    h["origin"] = {grid.origin.x(), grid.origin.y(), grid.origin.z()};
    h["spacing"] = grid.spacing;
    h["unit_um"] = grid.voxel_size_um / grid.spacing;
    json map = json::object();
    for (const auto& [label, family] : labels) map[std::to_string(label)] = to_string(family);
    h["label_map"] = map;
    return h;
}

template <typename T>
std::string to_little_endian(const std::vector<T>& values) {
    std::string bytes(values.size() * sizeof(T), '\0');
    std::memcpy(bytes.data(), values.data(), bytes.size());
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < bytes.size(); i += sizeof(T)) {
            std::reverse(bytes.begin() + i, bytes.begin() + i + sizeof(T));
        }
    }
    return bytes;
}

template <typename T>
std::vector<T> from_little_endian(std::string bytes) {
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i + sizeof(T) <= bytes.size(); i += sizeof(T)) {
            std::reverse(bytes.begin() + i, bytes.begin() + i + sizeof(T));
        }
    }
    std::vector<T> values(bytes.size() / sizeof(T));
    std::memcpy(values.data(), bytes.data(), values.size() * sizeof(T));
    return values;
}

template <typename T>
void save_impl(const Volume<T>& volume, const std::string& dtype, const std::filesystem::path& raw,
               const std::filesystem::path& header) {
    if (static_cast<std::int64_t>(volume.voxels.size()) != volume.grid.count()) {
        throw DomainError("save_volume: voxel count does not match dims");
    }
    write_file_atomic(raw, to_little_endian(volume.voxels));
    write_file_atomic(header, header_json(volume.grid, dtype, volume.label_map).dump(2) + "\n");
}

template <typename T>
Volume<T> load_impl(const std::string& dtype, const std::filesystem::path& raw,
                    const std::filesystem::path& header) {
    const VolumeHeader h = load_header(header);
    if (h.dtype != dtype) {
        throw ParseError(header.string(), "dtype", "expected " + dtype + ", found " + h.dtype);
    }
    Volume<T> volume;
    volume.grid = h.grid;
    volume.label_map = h.label_map;
    std::string bytes = read_file(raw);
    if (bytes.size() != static_cast<std::size_t>(h.grid.count()) * sizeof(T)) {
        throw ParseError(raw.string(), "voxels",
                         "size " + std::to_string(bytes.size()) + " bytes does not match dims");
    }
    volume.voxels = from_little_endian<T>(std::move(bytes));
    return volume;
}

}  // namespace

void save_volume(const LabelVolume& volume, const std::filesystem::path& raw,
                 const std::filesystem::path& header) {
    save_impl(volume, "uint16", raw, header);
}

void save_volume(const GrayVolume& volume, const std::filesystem::path& raw,
                 const std::filesystem::path& header) {
    save_impl(volume, "float32", raw, header);
}

LabelVolume load_label_volume(const std::filesystem::path& raw, const std::filesystem::path& header) {
    return load_impl<std::uint16_t>("uint16", raw, header);
}

GrayVolume load_gray_volume(const std::filesystem::path& raw, const std::filesystem::path& header) {
    return load_impl<float>("float32", raw, header);
}

void save_header(const VolumeHeader& header, const std::filesystem::path& path) {
    write_file_atomic(path, header_json(header.grid, header.dtype, header.label_map).dump(2) + "\n");
}

VolumeHeader load_header(const std::filesystem::path& path) {
    const std::string file = path.string();
    json h;
    try {
        h = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(file, "<document>", e.what());
    }
    auto need = [&](const char* field) -> const json& {
        if (!h.contains(field)) throw ParseError(file, field, "missing");
        return h.at(field);
    };
    VolumeHeader out;
    try {
        const json& dims = need("dims");
        if (!dims.is_array() || dims.size() != 3) throw ParseError(file, "dims", "expected 3 integers");
        for (int a = 0; a < 3; ++a) {
            out.grid.dims[a] = dims[a].get<std::int64_t>();
            if (out.grid.dims[a] < 1) throw ParseError(file, "dims", "must be positive");
        }
        out.grid.voxel_size_um = need("voxel_size_um").get<double>();
        out.dtype = need("dtype").get<std::string>();
        if (h.contains("spacing")) out.grid.spacing = h.at("spacing").get<double>();
        if (h.contains("origin")) {
            const json& o = h.at("origin");
            out.grid.origin = Vec3(o.at(0).get<double>(), o.at(1).get<double>(), o.at(2).get<double>());
        }
        out.unit_um = out.grid.voxel_size_um / out.grid.spacing;
        if (h.contains("label_map")) {
            for (const auto& [key, value] : h.at("label_map").items()) {
                out.label_map.emplace(std::stoi(key), family_from_string(value.get<std::string>()));
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(file, "<header>", e.what());
    } catch (const DomainError& e) {
        throw ParseError(file, "label_map", e.what());
    }
    return out;
}

}  // namespace textile
