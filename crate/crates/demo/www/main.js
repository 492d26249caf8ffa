import init, { qpe_distribution, amplification_curve, qpi_trace, version } from "./pkg/qpi_demo.js";

const PAD = { left: 48, right: 16, top: 12, bottom: 28 };

function num(id) {
  return Number(document.getElementById(id).value);
}

function frame(canvas, xmax, ymax, xlabel) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width - PAD.left - PAD.right;
  const h = canvas.height - PAD.top - PAD.bottom;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.beginPath();
  ctx.moveTo(PAD.left, PAD.top);
  ctx.lineTo(PAD.left, PAD.top + h);
  ctx.lineTo(PAD.left + w, PAD.top + h);
  ctx.stroke();
  for (let i = 0; i <= 4; i++) {
    const y = PAD.top + h - (h * i) / 4;
    ctx.fillText((ymax * i / 4).toPrecision(2), 4, y + 4);
    const x = PAD.left + (w * i) / 4;
    ctx.fillText((xmax * i / 4).toPrecision(3), x - 8, PAD.top + h + 16);
  }
  ctx.fillText(xlabel, PAD.left + w - 60, PAD.top + h + 26);
  return {
    ctx,
    x: (v) => PAD.left + (w * v) / xmax,
    y: (v) => PAD.top + h - (h * v) / ymax,
  };
}

function report(id, text, error = false) {
  const el = document.getElementById(id);
  el.textContent = text;
  el.className = error ? "summary error" : "summary";
}

function drawQpe() {
  let out;
  try {
    out = JSON.parse(qpe_distribution(num("qpe-pl"), num("qpe-pr"), num("qpe-pi"), num("qpe-h"), num("qpe-eps"), num("qpe-delta")));
  } catch (e) {
    return report("qpe-summary", String(e), true);
  }
  const xmax = Math.max(...out.values) * 1.05 || 1;
  const ymax = Math.max(...out.probabilities) * 1.1;
  const { ctx, x, y } = frame(document.getElementById("qpe-plot"), xmax, ymax, "decoded value");
  ctx.fillStyle = "rgba(60, 110, 200, 0.15)";
  ctx.fillRect(x(out.truth - out.epsilon), y(ymax), x(out.truth + out.epsilon) - x(out.truth - out.epsilon), y(0) - y(ymax));
  ctx.fillStyle = "#36c";
  out.values.forEach((v, i) => {
    const p = out.probabilities[i];
    if (p > 1e-6) ctx.fillRect(x(v) - 1.5, y(p), 3, y(0) - y(p));
  });
  ctx.strokeStyle = "#c33";
  ctx.beginPath();
  ctx.moveTo(x(out.truth), y(0));
  ctx.lineTo(x(out.truth), y(ymax));
  ctx.stroke();
  report("qpe-summary", `v = ${out.truth.toFixed(4)}  n = ${out.n}  t = ${out.t}  ε(n) = ${out.epsilon.toFixed(4)}  mass within ε = ${out.in_epsilon_mass.toFixed(4)}`);
}

function drawAmp() {
  let out;
  try {
    out = JSON.parse(amplification_curve(num("amp-n"), num("amp-thr"), num("amp-j")));
  } catch (e) {
    return report("amp-summary", String(e), true);
  }
  const jmax = out.measured.length - 1;
  const { ctx, x, y } = frame(document.getElementById("amp-plot"), jmax, 1, "rotations j");
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  const theta = Math.asin(Math.sqrt(out.p_good));
  for (let k = 0; k <= 400; k++) {
    const j = (jmax * k) / 400;
    const v = Math.sin((2 * j + 1) * theta) ** 2;
    k === 0 ? ctx.moveTo(x(j), y(v)) : ctx.lineTo(x(j), y(v));
  }
  ctx.stroke();
  ctx.fillStyle = "#36c";
  out.measured.forEach((p, j) => {
    ctx.beginPath();
    ctx.arc(x(j), y(p), 3, 0, 2 * Math.PI);
    ctx.fill();
  });
  report("amp-summary", `p_good = ${out.p_good.toExponential(3)}  best j = ${out.measured.indexOf(Math.max(...out.measured))}`);
}

function drawQpi() {
  let out;
  try {
    out = JSON.parse(qpi_trace(num("qpi-n"), num("qpi-c"), num("qpi-lambda"), BigInt(num("qpi-seed"))));
  } catch (e) {
    return report("qpi-summary", String(e), true);
  }
  const records = out.run.records;
  const kmax = Math.max(records.length, 1);
  const jmax = Math.max(1, ...records.map((r) => r.rotations));
  const { ctx, x, y } = frame(document.getElementById("qpi-plot"), kmax, 1, "iteration k");
  ctx.fillStyle = "rgba(200, 120, 40, 0.5)";
  records.forEach((r) => {
    const h = r.rotations / jmax;
    ctx.fillRect(x(r.k) - 1.5, y(h), 3, y(0) - y(h));
  });
  ctx.strokeStyle = "#36c";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(x(0), y(out.run.initial_value));
  records.forEach((r) => ctx.lineTo(x(r.k), y(r.value)));
  ctx.stroke();
  ctx.lineWidth = 1;
  report(
    "qpi-summary",
    `${out.run.status}: ${records.length} iterations, final estimate ${out.run.value.toFixed(4)}, ` +
      `true value ${out.true_value.toFixed(4)}, rotations ${out.run.total_rotations} ` +
      `(non-patience ${out.run.non_patience_rotations}), bars scaled to max j = ${jmax}`,
  );
}

await init();
document.title += ` (v${version()})`;
document.getElementById("qpe-run").addEventListener("click", drawQpe);
document.getElementById("amp-run").addEventListener("click", drawAmp);
document.getElementById("qpi-run").addEventListener("click", drawQpi);
drawQpe();
drawAmp();
drawQpi();
