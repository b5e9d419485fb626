import init, { v_curve, bessel_average, proportion_curve, proportion_at } from "./pkg/symsq_demo.js";

const $ = (id) => document.getElementById(id);

// series: [{ xs, ys, color }]; logx puts x on a log scale
function plot(canvas, series, { logx = false, marker = null } = {}) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 40;
  ctx.clearRect(0, 0, w, h);
  const fx = logx ? Math.log10 : (x) => x;
  const xs = series.flatMap((s) => s.xs.map(fx));
  const ys = series.flatMap((s) => s.ys).filter(Number.isFinite);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(0, ...ys), Math.max(...ys)];
  const px = (x) => pad + ((fx(x) - x0) / (x1 - x0)) * (w - 2 * pad);
  const py = (y) => h - pad - ((y - y0) / (y1 - y0 || 1)) * (h - 2 * pad);
  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.fillText(y1.toPrecision(3), 2, pad + 4);
  ctx.fillText(y0.toPrecision(3), 2, h - pad);
  ctx.fillText((logx ? 10 ** x0 : x0).toPrecision(3), pad, h - pad + 14);
  ctx.fillText((logx ? 10 ** x1 : x1).toPrecision(3), w - pad - 30, h - pad + 14);
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.beginPath();
    let pen = false;
    s.xs.forEach((x, i) => {
      if (!Number.isFinite(s.ys[i])) return (pen = false);
      pen ? ctx.lineTo(px(x), py(s.ys[i])) : ctx.moveTo(px(x), py(s.ys[i]));
      pen = true;
    });
    ctx.stroke();
  }
  if (marker) {
    ctx.fillStyle = "#000";
    ctx.beginPath();
    ctx.arc(px(marker[0]), py(marker[1]), 4, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function strided(arr, width) {
  const cols = Array.from({ length: width }, () => []);
  arr.forEach((v, i) => cols[i % width].push(v));
  return cols;
}

function drawV() {
  $("v-msg").textContent = "";
  try {
    const k = Number($("v-k").value);
    const [xi, v, approx] = strided(v_curve(k, 0.05, Number($("v-max").value), 160), 3);
    plot($("v-plot"), [
      { xs: xi, ys: v, color: "#1f77b4" },
      { xs: xi, ys: approx, color: "#d62728" },
    ], { logx: true });
  } catch (e) {
    $("v-msg").textContent = e.message ?? String(e);
  }
}

function runBessel() {
  $("b-msg").textContent = "";
  const lo = Number($("b-lo").value), hi = Number($("b-hi").value);
  const ts = Array.from({ length: 7 }, (_, i) => lo * (hi / lo) ** (i / 6));
  try {
    const [t, lhs, main, budget] = strided(bessel_average(Number($("b-k").value), Float64Array.from(ts)), 4);
    const rows = t.map((_, i) =>
      `<tr><td>${t[i].toFixed(1)}</td><td>${lhs[i].toExponential(6)}</td><td>${main[i].toExponential(6)}</td>` +
      `<td>${Math.abs(lhs[i] - main[i]).toExponential(2)}</td><td>${budget[i].toExponential(2)}</td></tr>`);
    $("b-table").innerHTML =
      "<tr><th>t</th><th>sum</th><th>main term</th><th>|difference|</th><th>budget</th></tr>" + rows.join("");
  } catch (e) {
    $("b-msg").textContent = e.message ?? String(e);
  }
}

let pCurve = null;
function drawProportion() {
  pCurve ??= strided(proportion_curve(200), 2);
  const a = Number($("p-a").value);
  const p = proportion_at(a);
  $("p-val").textContent = `a = ${a.toFixed(2)}, proportion = ${p.toFixed(4)} (limit 19/27 = ${(19 / 27).toFixed(4)})`;
  plot($("p-plot"), [{ xs: pCurve[0], ys: pCurve[1], color: "#2ca02c" }], { marker: [a, p] });
}

await init();
$("v-go").onclick = drawV;
$("b-go").onclick = runBessel;
$("p-a").oninput = drawProportion;
drawV();
runBessel();
drawProportion();
