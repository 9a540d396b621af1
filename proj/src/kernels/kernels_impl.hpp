// Copyright 2026  The drbss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DRBSS_KERNELS_IMPL_HPP_
#define DRBSS_KERNELS_IMPL_HPP_

#include "drbss/kernels.hpp"

namespace drbss::kernels::detail {

extern const KernelTable kScalarTable;
#if defined(DRBSS_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
#if defined(DRBSS_HAVE_NEON)
extern const KernelTable kNeonTable;
#endif

}  // namespace drbss::kernels::detail

#endif  // DRBSS_KERNELS_IMPL_HPP_
