#include "pft/interior_flow.hpp"

#include <algorithm>
#include <cmath>

#include "pft/errors.hpp"

namespace pft {

Vec2 FlowField::sample(const Vec2& image_pt) const {
  const double lx = std::clamp(image_pt.x() - roi.x, 0.0, double(roi.w - 1));
  const double ly = std::clamp(image_pt.y() - roi.y, 0.0, double(roi.h - 1));
  return Vec2(bilinear(u_x, lx, ly), bilinear(u_y, lx, ly));
}

namespace {

ImageF to_float(const ImageU8& img) {
  ImageF out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out.at(x, y) = img.at(x, y);
  return out;
}

ImageF downsample2(const ImageF& src) {
  ImageF dst(src.width() / 2, src.height() / 2);
  for (int y = 0; y < dst.height(); ++y)
    for (int x = 0; x < dst.width(); ++x)
      dst.at(x, y) = 0.25f * (src.at(2 * x, 2 * y) + src.at(2 * x + 1, 2 * y) +
                              src.at(2 * x, 2 * y + 1) +
                              src.at(2 * x + 1, 2 * y + 1));
  return dst;
}

// Smoothed central differences (Sobel / 8), derivative in intensity/pixel.
void gradients(const ImageF& img, ImageF& gx, ImageF& gy) {
  const int w = img.width(), h = img.height();
  gx = ImageF(w, h);
  gy = ImageF(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const float v00 = img.at_clamped(x - 1, y - 1),
                  v10 = img.at_clamped(x, y - 1),
                  v20 = img.at_clamped(x + 1, y - 1);
      const float v01 = img.at_clamped(x - 1, y),
                  v21 = img.at_clamped(x + 1, y);
      const float v02 = img.at_clamped(x - 1, y + 1),
                  v12 = img.at_clamped(x, y + 1),
                  v22 = img.at_clamped(x + 1, y + 1);
      gx.at(x, y) = ((v20 + 2 * v21 + v22) - (v00 + 2 * v01 + v02)) / 8.f;
      gy.at(x, y) = ((v02 + 2 * v12 + v22) - (v00 + 2 * v10 + v20)) / 8.f;
    }
}

// One pyramid level of sparse inverse search plus densification.
void process_level(const ImageF& i0, const ImageF& i1, const FlowParams& p,
                   ImageF& ux, ImageF& uy) {
  const int w = i0.width(), h = i0.height();
  const int psz = p.patch_size, pstr = p.patch_stride;
  const int ws = 1 + (w - psz) / pstr;
  const int hs = 1 + (h - psz) / pstr;

  ImageF gx, gy;
  gradients(i0, gx, gy);

  ImageF sx(ws, hs), sy(ws, hs);
  for (int is = 0; is < hs; ++is) {
    for (int js = 0; js < ws; ++js) {
      const int x0 = js * pstr, y0 = is * pstr;
      const double init_ux = ux.at(x0 + psz / 2, y0 + psz / 2);
      const double init_uy = uy.at(x0 + psz / 2, y0 + psz / 2);

      // Fixed template Hessian (structure tensor over the patch).
      double hxx = 0, hyy = 0, hxy = 0;
      for (int dy = 0; dy < psz; ++dy)
        for (int dx = 0; dx < psz; ++dx) {
          const double vx = gx.at(x0 + dx, y0 + dy);
          const double vy = gy.at(x0 + dx, y0 + dy);
          hxx += vx * vx;
          hyy += vy * vy;
          hxy += vx * vy;
        }
      double det = hxx * hyy - hxy * hxy;
      if (std::abs(det) < 1e-3) det = det < 0 ? -1e-3 : 1e-3;
      const double inv00 = hyy / det, inv01 = -hxy / det, inv11 = hxx / det;

      double cur_ux = init_ux, cur_uy = init_uy;
      double prev_ssd = std::numeric_limits<double>::max();
      for (int it = 0; it < p.inverse_search_iters; ++it) {
        double ssd = 0, dux = 0, duy = 0;
        for (int dy = 0; dy < psz; ++dy)
          for (int dx = 0; dx < psz; ++dx) {
            const double sxp = std::clamp(x0 + dx + cur_ux, 0.0, w - 1.0);
            const double syp = std::clamp(y0 + dy + cur_uy, 0.0, h - 1.0);
            const double diff =
                bilinear(i1, sxp, syp) - i0.at(x0 + dx, y0 + dy);
            ssd += diff * diff;
            dux += diff * gx.at(x0 + dx, y0 + dy);
            duy += diff * gy.at(x0 + dx, y0 + dy);
          }
        cur_ux -= inv00 * dux + inv01 * duy;
        cur_uy -= inv01 * dux + inv11 * duy;
        if (ssd >= prev_ssd) break;
        prev_ssd = ssd;
      }
      const double jump = std::hypot(cur_ux - init_ux, cur_uy - init_uy);
      if (jump > psz) {
        cur_ux = init_ux;
        cur_uy = init_uy;
      }
      sx.at(js, is) = float(cur_ux);
      sy.at(js, is) = float(cur_uy);
    }
  }

  if (p.densification) {
    // Each pixel blends the flows of all patches covering it, weighted by
    // photometric agreement at that pixel.
    auto first_patch = [&](int coord) {
      return coord < psz ? 0 : (coord - psz) / pstr + 1;
    };
    for (int y = 0; y < h; ++y) {
      const int is0 = first_patch(y);
      const int is1 = std::min(hs - 1, y / pstr);
      for (int x = 0; x < w; ++x) {
        const int js0 = first_patch(x);
        const int js1 = std::min(ws - 1, x / pstr);
        double sum_w = 0, sum_ux = 0, sum_uy = 0;
        for (int is = is0; is <= is1; ++is)
          for (int js = js0; js <= js1; ++js) {
            const double pux = sx.at(js, is), puy = sy.at(js, is);
            const double sxp = std::clamp(x + pux, 0.0, w - 1.0);
            const double syp = std::clamp(y + puy, 0.0, h - 1.0);
            const double diff = bilinear(i1, sxp, syp) - i0.at(x, y);
            const double wgt = 1.0 / std::max(1.0, std::abs(diff));
            sum_w += wgt;
            sum_ux += wgt * pux;
            sum_uy += wgt * puy;
          }
        if (sum_w > 0) {
          ux.at(x, y) = float(sum_ux / sum_w);
          uy.at(x, y) = float(sum_uy / sum_w);
        }
      }
    }
  } else {
    // Bilinear interpolation over the sparse grid (patch centers).
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double gsx =
            std::clamp((x - psz / 2.0) / pstr, 0.0, double(ws - 1));
        const double gsy =
            std::clamp((y - psz / 2.0) / pstr, 0.0, double(hs - 1));
        ux.at(x, y) = bilinear(sx, gsx, gsy);
        uy.at(x, y) = bilinear(sy, gsx, gsy);
      }
  }
}

// Resize a flow component between resolutions, rescaling displacement values.
ImageF upsample_flow(const ImageF& src, int dst_w, int dst_h, double scale) {
  ImageF dst(dst_w, dst_h);
  const double rx = double(src.width()) / dst_w;
  const double ry = double(src.height()) / dst_h;
  for (int y = 0; y < dst_h; ++y)
    for (int x = 0; x < dst_w; ++x) {
      const double sxp = std::clamp((x + 0.5) * rx - 0.5, 0.0, src.width() - 1.0);
      const double syp = std::clamp((y + 0.5) * ry - 0.5, 0.0, src.height() - 1.0);
      dst.at(x, y) = float(bilinear(src, sxp, syp) * scale);
    }
  return dst;
}

}  // namespace

FlowField compute_flow(const ImageU8& prev_gray, const ImageU8& cur_gray,
                       const Rect& roi, const FlowParams& params) {
  if (prev_gray.width() != cur_gray.width() ||
      prev_gray.height() != cur_gray.height())
    throw Error("flow inputs must have identical dimensions");
  const bool cropped =
      prev_gray.width() == roi.w && prev_gray.height() == roi.h;
  const ImageU8& prev_roi = cropped ? prev_gray : crop(prev_gray, roi);
  const ImageU8& cur_roi = cropped ? cur_gray : crop(cur_gray, roi);

  // Pyramid: level 0 is half ROI resolution.
  std::vector<ImageF> p0(params.pyramid_levels), p1(params.pyramid_levels);
  p0[0] = downsample2(to_float(prev_roi));
  p1[0] = downsample2(to_float(cur_roi));
  for (int l = 1; l < params.pyramid_levels; ++l) {
    p0[l] = downsample2(p0[l - 1]);
    p1[l] = downsample2(p1[l - 1]);
  }
  const ImageF& coarsest = p0[params.pyramid_levels - 1];
  if (coarsest.width() < params.patch_size ||
      coarsest.height() < params.patch_size)
    throw RoiTooSmall("roi " + std::to_string(roi.w) + "x" +
                      std::to_string(roi.h) +
                      " cannot fit one patch at the coarsest pyramid level");

  ImageF ux(coarsest.width(), coarsest.height(), 0.f);
  ImageF uy(coarsest.width(), coarsest.height(), 0.f);
  for (int l = params.pyramid_levels - 1; l >= 0; --l) {
    if (l < params.pyramid_levels - 1) {
      ux = upsample_flow(ux, p0[l].width(), p0[l].height(),
                         double(p0[l].width()) / p0[l + 1].width());
      uy = upsample_flow(uy, p0[l].width(), p0[l].height(),
                         double(p0[l].height()) / p0[l + 1].height());
    }
    process_level(p0[l], p1[l], params, ux, uy);
  }

  FlowField field;
  field.roi = roi;
  field.u_x = upsample_flow(ux, roi.w, roi.h, double(roi.w) / ux.width());
  field.u_y = upsample_flow(uy, roi.w, roi.h, double(roi.h) / uy.height());
  return field;
}

double confidence_from_error(double e) {
  return std::max(1.0 - e * e, 0.0);
}

namespace {

constexpr int kPatch = 3;       // s
constexpr double kEtaI = 40.0;  // intensity regularizer
constexpr double kEtaG = 40.0;  // gradient regularizer
constexpr double kEtaS = 80.0;  // smoothness regularizer

double grad_mag_at(const ImageU8& img, double x, double y) {
  const double gx = (bilinear_u8(img, x + 1, y) - bilinear_u8(img, x - 1, y)) / 2.0;
  const double gy = (bilinear_u8(img, x, y + 1) - bilinear_u8(img, x, y - 1)) / 2.0;
  return std::hypot(gx, gy);
}

}  // namespace

double flow_confidence(const ImageU8& prev_gray, const ImageU8& cur_gray,
                       const FlowField& flow, const Vec2& x_in) {
  const Rect& roi = flow.roi;
  if (prev_gray.width() != roi.w || prev_gray.height() != roi.h ||
      cur_gray.width() != roi.w || cur_gray.height() != roi.h)
    throw Error("flow_confidence expects ROI-sized crops");

  const int cx = int(std::lround(x_in.x() - roi.x));
  const int cy = int(std::lround(x_in.y() - roi.y));
  const int half = kPatch / 2;
  // 1 px margin for image and flow central differences.
  if (cx - half < 1 || cy - half < 1 || cx + half >= roi.w - 1 ||
      cy + half >= roi.h - 1)
    throw PatchOutOfBounds();

  double sum_prev = 0, sum_cur = 0;
  double sum_gm_prev = 0, sum_gm_cur = 0;
  double smooth = 0;
  for (int dy = -half; dy <= half; ++dy)
    for (int dx = -half; dx <= half; ++dx) {
      const int x = cx + dx, y = cy + dy;
      const double fx = flow.u_x.at(x, y), fy = flow.u_y.at(x, y);
      const double wx = std::clamp(x + fx, 0.0, roi.w - 1.0);
      const double wy = std::clamp(y + fy, 0.0, roi.h - 1.0);

      sum_prev += prev_gray.at(x, y);
      sum_cur += bilinear_u8(cur_gray, wx, wy);
      sum_gm_prev += grad_mag_at(prev_gray, x, y);
      sum_gm_cur += grad_mag_at(cur_gray, wx, wy);

      const double uxx = (flow.u_x.at(x + 1, y) - flow.u_x.at(x - 1, y)) / 2.0;
      const double uxy = (flow.u_x.at(x, y + 1) - flow.u_x.at(x, y - 1)) / 2.0;
      const double uyx = (flow.u_y.at(x + 1, y) - flow.u_y.at(x - 1, y)) / 2.0;
      const double uyy = (flow.u_y.at(x, y + 1) - flow.u_y.at(x, y - 1)) / 2.0;
      smooth += uxx * uxx + uxy * uxy + uyx * uyx + uyy * uyy;
    }

  const double s2 = double(kPatch) * kPatch;
  const double e_i = std::abs(sum_cur - sum_prev) / kEtaI / s2;
  const double e_g = std::abs(sum_gm_cur - sum_gm_prev) / kEtaG / s2;
  const double e_s = smooth / kEtaS / s2;
  return confidence_from_error(e_i + e_g + e_s);
}

std::vector<InteriorCorrespondence> interior_correspondences(
    const std::vector<Eigen::Vector3f>& template_points, const Pose& t_cm,
    const CameraIntrinsics& k, const FlowField& flow) {
  std::vector<InteriorCorrespondence> out;
  out.reserve(template_points.size());
  const Rect& roi = flow.roi;
  for (const auto& xf : template_points) {
    const auto px = project(k, t_cm, xf.cast<double>());
    if (!px) continue;
    if (!roi.contains_bilinear(px->x(), px->y())) continue;
    InteriorCorrespondence c;
    c.x_in = *px;
    c.x_in_prime = *px + flow.sample(*px);
    c.x_model = xf.cast<double>();
    out.push_back(c);
  }
  return out;
}

std::vector<InteriorCorrespondence> interior_correspondences(
    const std::vector<Eigen::Vector3f>& template_points, const Pose& t_cm,
    const CameraIntrinsics& k, const FlowField& flow,
    const ImageU8& prev_gray, const ImageU8& cur_gray) {
  auto corrs = interior_correspondences(template_points, t_cm, k, flow);
  std::vector<InteriorCorrespondence> kept;
  kept.reserve(corrs.size());
  for (auto& c : corrs) {
    try {
      c.c_in = flow_confidence(prev_gray, cur_gray, flow, c.x_in);
    } catch (const PatchOutOfBounds&) {
      continue;  // confidence patch straddles the ROI border
    }
    kept.push_back(c);
  }
  return kept;
}

double interior_weight(double r, double c, double gamma) {
  return c * std::exp(-gamma * r * r);
}

}  // namespace pft
