#include "hyprec/onet/onetpack.hpp"

#include "hyprec/util/errors.hpp"

namespace hyprec::onet {

using nlohmann::json;

namespace {

constexpr std::array<char, 4> kMagic{'O', 'N', 'P', 'K'};

json encode_layers(const std::vector<Layer>& layers, io::Bytes& payload) {
    json out = json::array();
    for (const auto& l : layers) {
        json e{{"kind", to_string(l.kind)},
               {"shape", l.shape},
               {"activation", to_string(l.activation)},
               {"weight_offset", nullptr},
               {"bias_offset", nullptr}};
        if (l.kind != LayerKind::Flatten) {
            e["weight_offset"] = io::append_f64(payload, l.weight);
            e["bias_offset"] = io::append_f64(payload, l.bias);
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::uint64_t ipow3(std::uint64_t d) {
    std::uint64_t n = 1;
    while (d-- > 0) n *= 3;
    return n;
}

std::vector<Layer> decode_layers(const json& arr, std::span<const std::uint8_t> payload) {
    std::vector<Layer> layers;
    for (const auto& e : arr) {
        Layer l;
        l.kind = layer_kind_from_string(e.at("kind").get<std::string>());
        l.activation = activation_from_string(e.at("activation").get<std::string>());
        l.shape = e.at("shape").get<std::vector<std::uint64_t>>();
        std::uint64_t nw = 0, nb = 0;
        if (l.kind == LayerKind::Dense) {
            if (l.shape.size() != 2) throw FormatError("dense layer shape must have 2 entries");
            nw = l.shape[0] * l.shape[1];
            nb = l.shape[1];
        } else if (l.kind == LayerKind::Conv) {
            if (l.shape.size() != 3 || l.shape[0] < 1 || l.shape[0] > 3)
                throw FormatError("conv layer shape must be {dim, c_in, c_out}");
            nw = l.shape[1] * l.shape[2] * ipow3(l.shape[0]);
            nb = l.shape[2];
        }
        if (l.kind != LayerKind::Flatten) {
            l.weight = io::read_f64(payload, e.at("weight_offset").get<std::uint64_t>(), nw);
            l.bias = io::read_f64(payload, e.at("bias_offset").get<std::uint64_t>(), nb);
        }
        layers.push_back(std::move(l));
    }
    return layers;
}

} // namespace

io::Bytes encode_model(const OnetModel& m) {
    validate(m);
    io::Container c;
    c.magic = kMagic;
    c.version = kOnetPackVersion;
    json branches = json::array();
    for (const auto& b : m.branches) {
        json grid{{"dim", b.sensors.dim}, {"shape", b.sensors.shape}, {"coords_offset", nullptr}};
        json layers = encode_layers(b.layers, c.payload);
        if (b.sensors.dim > 0) grid["coords_offset"] = io::append_f64(c.payload, b.sensors.coords.data());
        branches.push_back({{"layers", std::move(layers)}, {"sensor_grid", std::move(grid)}});
    }
    json trunk{{"layers", encode_layers(m.trunk, c.payload)}};
    c.manifest = {{"p", m.p},
                  {"nf", m.nf()},
                  {"dtype", "f64le"},
                  {"boundary_mask", m.boundary_mask == BoundaryMask::Poly ? "poly" : "none"},
                  {"branches", std::move(branches)},
                  {"trunk", std::move(trunk)}};
    if (m.rhs_branch) c.manifest["rhs_branch"] = *m.rhs_branch;
    if (!m.id.empty()) c.manifest["id"] = m.id;
    return io::encode(c);
}

OnetModel decode_model(std::span<const std::uint8_t> bytes) {
    const io::Container c = io::decode(bytes, kMagic);
    if (c.version != kOnetPackVersion)
        throw FormatError("unsupported ONetPack version " + std::to_string(c.version));
    OnetModel m;
    try {
        const json& j = c.manifest;
        if (j.at("dtype").get<std::string>() != "f64le")
            throw FormatError("unsupported dtype '" + j.at("dtype").get<std::string>() + "'");
        m.p = j.at("p").get<std::size_t>();
        const auto mask = j.at("boundary_mask").get<std::string>();
        if (mask == "poly")
            m.boundary_mask = BoundaryMask::Poly;
        else if (mask != "none")
            throw FormatError("unknown boundary_mask '" + mask + "'");
        for (const auto& jb : j.at("branches")) {
            Branch b;
            b.layers = decode_layers(jb.at("layers"), c.payload);
            const auto& g = jb.at("sensor_grid");
            b.sensors.dim = g.at("dim").get<int>();
            b.sensors.shape = g.at("shape").get<std::vector<std::uint64_t>>();
            if (b.sensors.dim < 0 || b.sensors.dim > 3)
                throw FormatError("sensor grid dim must be in 0..3");
            if (b.sensors.dim > 0) {
                const std::size_t n = b.sensors.size();
                b.sensors.coords = DenseMatrix(
                    n, b.sensors.dim,
                    io::read_f64(c.payload, g.at("coords_offset").get<std::uint64_t>(),
                                 n * static_cast<std::size_t>(b.sensors.dim)));
            }
            m.branches.push_back(std::move(b));
        }
        if (j.at("nf").get<std::size_t>() != m.branches.size())
            throw FormatError("nf does not match the number of branches");
        m.trunk = decode_layers(j.at("trunk").at("layers"), c.payload);
        if (j.contains("rhs_branch")) m.rhs_branch = j.at("rhs_branch").get<std::size_t>();
        if (j.contains("id")) m.id = j.at("id").get<std::string>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed ONetPack manifest: ") + e.what());
    }
    validate(m);
    return m;
}

void save_model(const OnetModel& m, const std::string& path) {
    io::write_file(path, encode_model(m));
}

OnetModel load_model(const std::string& path) { return decode_model(io::read_file(path)); }

} // namespace hyprec::onet
