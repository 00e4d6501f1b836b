#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "volgrid/volume.hpp"

namespace imgio {

// Subset of the 348-byte NIfTI-1 header the toolkit reads and writes.
struct NiftiHeader {
    int16_t dim[8] = {0};
    int16_t datatype = 0;
    int16_t bitpix = 0;
    float pixdim[8] = {0};
    float vox_offset = 0;
    float scl_slope = 0;
    float scl_inter = 0;
    char magic[4] = {0};
};

// NIfTI-1 datatype codes supported by the reader.
enum NiftiDatatype : int16_t {
    kUint8 = 2,
    kInt16 = 4,
    kFloat32 = 16,
    kFloat64 = 64,
};

struct NiftiVolume {
    volgrid::Volume volume;
    NiftiHeader header;
};

// Parses a complete single-file NIfTI-1 payload. Gzip-compressed input is
// detected by magic bytes and inflated first. Stored values are rescaled by
// scl_slope/scl_inter (slope 0 treated as 1).
NiftiVolume read_nifti(const std::vector<unsigned char>& bytes);

// Emits single-file NIfTI-1: float32 data, scl_slope=1, scl_inter=0,
// vox_offset=352, magic "n+1". read_nifti inverts it exactly.
std::vector<unsigned char> write_nifti(const volgrid::Volume& vol);

volgrid::Volume read_nifti_file(const std::string& path);
void write_nifti_file(const std::string& path, const volgrid::Volume& vol);

// Gzip helpers (content-addressed: decompression triggers on 0x1f 0x8b).
bool is_gzip(const std::vector<unsigned char>& bytes);
std::vector<unsigned char> gzip_decompress(const std::vector<unsigned char>& bytes);
std::vector<unsigned char> gzip_compress(const std::vector<unsigned char>& bytes);

}  // namespace imgio
