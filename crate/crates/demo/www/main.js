import init, { curves, histogram, residuals } from "./pkg/hypoexp_demo.js";

const $ = (id) => document.getElementById(id);

function axes(ctx, w, h) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(30, 10);
  ctx.lineTo(30, h - 20);
  ctx.lineTo(w - 10, h - 20);
  ctx.stroke();
}

function line(ctx, xs, ys, xmax, ymax, w, h, color) {
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.beginPath();
  xs.forEach((x, i) => {
    const px = 30 + (x / xmax) * (w - 40);
    const py = h - 20 - (ys[i] / ymax) * (h - 30);
    i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
  });
  ctx.stroke();
  ctx.lineWidth = 1;
}

function report(out, fn) {
  out.classList.remove("error");
  try {
    fn();
  } catch (e) {
    out.classList.add("error");
    out.textContent = String(e.message ?? e);
  }
}

function plotCurves() {
  const out = $("curve-out");
  report(out, () => {
    const r = JSON.parse(curves($("curve-rates").value, 400));
    const c = $("curve-canvas");
    const ctx = c.getContext("2d");
    axes(ctx, c.width, c.height);
    const xmax = r.x[r.x.length - 1];
    const pmax = Math.max(...r.pdf);
    line(ctx, r.x, r.pdf, xmax, pmax * 1.05, c.width, c.height, "#1f77b4");
    line(ctx, r.x, r.cdf, xmax, 1.05, c.width, c.height, "#d62728");
    out.textContent =
      `weights  ${r.weights.map((v) => v.toPrecision(6)).join(", ")}\n` +
      `mean     ${r.mean}\nvariance ${r.variance}\n(blue: density, red: cdf)`;
  });
}

function plotHistogram() {
  const out = $("hist-out");
  report(out, () => {
    const r = JSON.parse(
      histogram($("hist-rates").value, Number($("hist-count").value), Number($("hist-bins").value), Number($("hist-seed").value)),
    );
    const c = $("hist-canvas");
    const ctx = c.getContext("2d");
    axes(ctx, c.width, c.height);
    const xmax = r.centres[r.centres.length - 1] + r.width / 2;
    const ymax = Math.max(...r.density, ...r.pdf) * 1.05;
    ctx.fillStyle = "#aec7e8";
    r.density.forEach((d, i) => {
      const x0 = 30 + ((r.centres[i] - r.width / 2) / xmax) * (c.width - 40);
      const bw = (r.width / xmax) * (c.width - 40);
      const bh = (d / ymax) * (c.height - 30);
      ctx.fillRect(x0, c.height - 20 - bh, Math.max(bw - 1, 1), bh);
    });
    line(ctx, r.centres, r.pdf, xmax, ymax, c.width, c.height, "#d62728");
    out.textContent = `sample mean ${r.sample_mean}\nexact mean  ${r.mean}`;
  });
}

function checkResiduals() {
  const out = $("res-out");
  report(out, () => {
    const r = JSON.parse(residuals($("res-psi").value, $("res-scales").value, $("res-eq").value, Number($("res-order").value)));
    const c = $("res-canvas");
    const ctx = c.getContext("2d");
    axes(ctx, c.width, c.height);
    const mags = r.residuals.map((v) => Math.abs(v));
    const ymax = Math.max(...mags, 1e-12);
    const bw = (c.width - 40) / mags.length;
    mags.forEach((m, k) => {
      ctx.fillStyle = m > r.tolerance ? "#d62728" : "#2ca02c";
      const bh = (m / ymax) * (c.height - 30);
      ctx.fillRect(30 + k * bw, c.height - 20 - bh, Math.max(bw - 2, 1), bh);
    });
    const first = r.first_violation_k === null ? "none" : r.first_violation_k;
    const lambda = r.fitted_lambda === undefined ? "" : `\nfitted rate ${r.fitted_lambda}`;
    out.textContent = `verdict ${r.verdict}\nfirst violation at k = ${first}${lambda}`;
  });
}

await init();
$("curve-go").addEventListener("click", plotCurves);
$("hist-go").addEventListener("click", plotHistogram);
$("res-go").addEventListener("click", checkResiduals);
plotCurves();
plotHistogram();
checkResiduals();
