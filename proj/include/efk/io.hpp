#ifndef EFK_IO_HPP
#define EFK_IO_HPP

#include <filesystem>
#include <string>

#include "efk/field2d.hpp"
#include "efk/profile.hpp"

namespace efk {

// Profile binary: magic "EFK1", version u32=1, n u32, m u32, L f64, beta f64,
// then node-major (row-major) f64 values, little-endian.
void write_profile_binary(const std::filesystem::path& path, const Profile1D& p);
Profile1D read_profile_binary(const std::filesystem::path& path, PotentialPtr pot);

// Field binary: magic "EFK2", version u32=1, nt,nx,m u32, T,L,beta f64,
// row-major (t-major) f64 values, little-endian.
void write_field_binary(const std::filesystem::path& path, const Field2D& f);
Field2D read_field_binary(const std::filesystem::path& path, PotentialPtr pot,
                          OperatorVariant variant);

// CSV with header x,u_1..u_m.
void write_profile_csv(const std::filesystem::path& path, const Profile1D& p);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace efk

#endif  // EFK_IO_HPP
