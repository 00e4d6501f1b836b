#include "imgio/nifti.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>

#include "common/csv.hpp"
#include "common/error.hpp"

namespace imgio {

namespace {

constexpr size_t kHeaderSize = 348;
constexpr size_t kVoxOffset = 352;

template <typename T>
T read_le(const unsigned char* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));  // little-endian host assumed
    return v;
}

template <typename T>
void write_le(std::vector<unsigned char>& out, size_t offset, T v) {
    std::memcpy(out.data() + offset, &v, sizeof(T));
}

size_t dtype_size(int16_t code) {
    switch (code) {
        case kUint8: return 1;
        case kInt16: return 2;
        case kFloat32: return 4;
        case kFloat64: return 8;
        default:
            throw common::format_error("nifti: unsupported datatype code " +
                                       std::to_string(code));
    }
}

}  // namespace

bool is_gzip(const std::vector<unsigned char>& bytes) {
    return bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b;
}

std::vector<unsigned char> gzip_decompress(const std::vector<unsigned char>& bytes) {
    z_stream strm{};
    if (inflateInit2(&strm, 15 + 32) != Z_OK)  // auto-detect gzip/zlib wrapper
        throw common::io_error("nifti: inflateInit failed");
    std::vector<unsigned char> out;
    out.reserve(bytes.size() * 4);
    unsigned char buf[65536];
    strm.next_in = const_cast<unsigned char*>(bytes.data());
    strm.avail_in = static_cast<uInt>(bytes.size());
    int ret = Z_OK;
    do {
        strm.next_out = buf;
        strm.avail_out = sizeof(buf);
        ret = inflate(&strm, Z_NO_FLUSH);
        if (ret != Z_OK && ret != Z_STREAM_END) {
            inflateEnd(&strm);
            throw common::io_error("nifti: gzip payload corrupt or truncated");
        }
        out.insert(out.end(), buf, buf + (sizeof(buf) - strm.avail_out));
    } while (ret != Z_STREAM_END && (strm.avail_in > 0 || strm.avail_out == 0));
    inflateEnd(&strm);
    if (ret != Z_STREAM_END)
        throw common::io_error("nifti: gzip payload truncated");
    return out;
}

std::vector<unsigned char> gzip_compress(const std::vector<unsigned char>& bytes) {
    z_stream strm{};
    if (deflateInit2(&strm, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                     Z_DEFAULT_STRATEGY) != Z_OK)
        throw common::io_error("nifti: deflateInit failed");
    std::vector<unsigned char> out;
    unsigned char buf[65536];
    strm.next_in = const_cast<unsigned char*>(bytes.data());
    strm.avail_in = static_cast<uInt>(bytes.size());
    int ret = Z_OK;
    do {
        strm.next_out = buf;
        strm.avail_out = sizeof(buf);
        ret = deflate(&strm, Z_FINISH);
        out.insert(out.end(), buf, buf + (sizeof(buf) - strm.avail_out));
    } while (ret != Z_STREAM_END);
    deflateEnd(&strm);
    return out;
}

NiftiVolume read_nifti(const std::vector<unsigned char>& raw) {
    const std::vector<unsigned char>* bytes = &raw;
    std::vector<unsigned char> inflated;
    if (is_gzip(raw)) {
        inflated = gzip_decompress(raw);
        bytes = &inflated;
    }
    const auto& b = *bytes;
    if (b.size() < kHeaderSize)
        throw common::io_error("nifti: payload shorter than the 348-byte header");

    NiftiHeader hdr;
    std::memcpy(hdr.magic, b.data() + 344, 4);
    const bool single = std::memcmp(hdr.magic, "n+1", 4) == 0;
    const bool pair = std::memcmp(hdr.magic, "ni1", 4) == 0;
    if (!single && !pair)
        throw common::format_error("nifti: bad magic");
    const int32_t sizeof_hdr = read_le<int32_t>(b.data() + 0);
    if (sizeof_hdr != 348)
        throw common::format_error("nifti: sizeof_hdr is not 348");

    for (int i = 0; i < 8; ++i) hdr.dim[i] = read_le<int16_t>(b.data() + 40 + 2 * i);
    hdr.datatype = read_le<int16_t>(b.data() + 70);
    hdr.bitpix = read_le<int16_t>(b.data() + 72);
    for (int i = 0; i < 8; ++i) hdr.pixdim[i] = read_le<float>(b.data() + 76 + 4 * i);
    hdr.vox_offset = read_le<float>(b.data() + 108);
    hdr.scl_slope = read_le<float>(b.data() + 112);
    hdr.scl_inter = read_le<float>(b.data() + 116);

    if (hdr.dim[0] < 1 || hdr.dim[0] > 7)
        throw common::format_error("nifti: dim[0] out of [1,7]");
    int nx = hdr.dim[1], ny = hdr.dim[0] >= 2 ? hdr.dim[2] : 1,
        nz = hdr.dim[0] >= 3 ? hdr.dim[3] : 1;
    if (nx < 1 || ny < 1 || nz < 1)
        throw common::format_error("nifti: nonpositive dimension");
    for (int i = 4; i <= hdr.dim[0]; ++i)
        if (hdr.dim[i] > 1)
            throw common::format_error("nifti: >3 nontrivial dimensions unsupported");

    const size_t esize = dtype_size(hdr.datatype);
    const size_t nvox = static_cast<size_t>(nx) * ny * nz;
    const size_t off = pair ? 0 : static_cast<size_t>(hdr.vox_offset);
    if (pair)
        throw common::format_error("nifti: header/image pairs unsupported (need n+1)");
    if (off < kHeaderSize)
        throw common::format_error("nifti: vox_offset overlaps header");
    if (b.size() < off + nvox * esize)
        throw common::io_error("nifti: truncated voxel payload");

    volgrid::Volume vol;
    vol.shape = {nx, ny, nz};
    for (int a = 0; a < 3; ++a) {
        double p = hdr.pixdim[a + 1];
        vol.spacing[a] = p > 0 ? p : 1.0;
    }
    const int16_t qform = read_le<int16_t>(b.data() + 252);
    if (qform > 0) {
        vol.origin = {read_le<float>(b.data() + 268), read_le<float>(b.data() + 272),
                      read_le<float>(b.data() + 276)};
    }
    const double slope = hdr.scl_slope == 0.0f ? 1.0 : hdr.scl_slope;
    const double inter = hdr.scl_inter;
    vol.data.resize(nvox);
    const unsigned char* p = b.data() + off;
    switch (hdr.datatype) {
        case kUint8:
            for (size_t i = 0; i < nvox; ++i)
                vol.data[i] = static_cast<float>(p[i] * slope + inter);
            break;
        case kInt16:
            for (size_t i = 0; i < nvox; ++i)
                vol.data[i] = static_cast<float>(read_le<int16_t>(p + 2 * i) * slope + inter);
            break;
        case kFloat32:
            for (size_t i = 0; i < nvox; ++i)
                vol.data[i] = static_cast<float>(read_le<float>(p + 4 * i) * slope + inter);
            break;
        case kFloat64:
            for (size_t i = 0; i < nvox; ++i)
                vol.data[i] = static_cast<float>(read_le<double>(p + 8 * i) * slope + inter);
            break;
        default:
            throw common::format_error("nifti: unsupported datatype");
    }
    for (float v : vol.data)
        if (!std::isfinite(v)) throw common::format_error("nifti: non-finite voxel value");
    return {std::move(vol), hdr};
}

std::vector<unsigned char> write_nifti(const volgrid::Volume& vol) {
    volgrid::validate_volume(vol);
    const size_t nvox = vol.voxel_count();
    std::vector<unsigned char> out(kVoxOffset + nvox * 4, 0);

    write_le<int32_t>(out, 0, 348);
    write_le<int16_t>(out, 40, 3);  // dim[0]
    write_le<int16_t>(out, 42, static_cast<int16_t>(vol.shape[0]));
    write_le<int16_t>(out, 44, static_cast<int16_t>(vol.shape[1]));
    write_le<int16_t>(out, 46, static_cast<int16_t>(vol.shape[2]));
    for (int i = 4; i < 8; ++i) write_le<int16_t>(out, 40 + 2 * i, 1);
    write_le<int16_t>(out, 70, kFloat32);
    write_le<int16_t>(out, 72, 32);  // bitpix
    write_le<float>(out, 76, 1.0f);  // pixdim[0] (qfac)
    write_le<float>(out, 80, static_cast<float>(vol.spacing[0]));
    write_le<float>(out, 84, static_cast<float>(vol.spacing[1]));
    write_le<float>(out, 88, static_cast<float>(vol.spacing[2]));
    write_le<float>(out, 108, static_cast<float>(kVoxOffset));
    write_le<float>(out, 112, 1.0f);  // scl_slope
    write_le<float>(out, 116, 0.0f);  // scl_inter
    write_le<int16_t>(out, 252, 1);   // qform_code, identity quaternion
    write_le<float>(out, 268, static_cast<float>(vol.origin[0]));
    write_le<float>(out, 272, static_cast<float>(vol.origin[1]));
    write_le<float>(out, 276, static_cast<float>(vol.origin[2]));
    std::memcpy(out.data() + 344, "n+1", 4);

    for (size_t i = 0; i < nvox; ++i)
        write_le<float>(out, kVoxOffset + 4 * i, vol.data[i]);
    return out;
}

volgrid::Volume read_nifti_file(const std::string& path) {
    return read_nifti(common::read_binary_file(path)).volume;
}

void write_nifti_file(const std::string& path, const volgrid::Volume& vol) {
    auto bytes = write_nifti(vol);
    common::write_binary_file(path, bytes.data(), bytes.size());
}

}  // namespace imgio
