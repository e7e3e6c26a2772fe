#pragma once

#include <string>

#include "stylecloak/ndgrad/tensor.hpp"

namespace stylecloak::ndgrad {

// Little-endian binary tensor container:
//   magic "NDT1" | u8 dtype (1 = f64) | u8 rank | u64 extent[rank] | f64 data
void save_tensor(const std::string& path, const Tensor& t);
Tensor load_tensor(const std::string& path);

}  // namespace stylecloak::ndgrad
