import init, { example_facets, explore, beta_curve, consistency } from "./pkg/simplex_forecast_web.js";

const $ = (id) => document.getElementById(id);

function show(out, f) {
  out.classList.remove("err");
  try {
    return f();
  } catch (e) {
    out.classList.add("err");
    out.textContent = String(e.message ?? e);
  }
}

function drawComplex(canvas, data) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const verts = [...new Set(data.facets.flat())].sort((a, b) => a - b);
  const inBall = new Set(data.members);
  const pos = new Map();
  const r = Math.min(canvas.width, canvas.height) / 2 - 30;
  verts.forEach((v, i) => {
    const a = (2 * Math.PI * i) / verts.length;
    pos.set(v, [canvas.width / 2 + r * Math.cos(a), canvas.height / 2 + r * Math.sin(a)]);
  });
  for (const f of data.facets) {
    const ball = f.every((v) => inBall.has(v));
    if (f.length >= 3) {
      ctx.fillStyle = ball ? "rgba(230,120,40,.25)" : "rgba(120,120,120,.12)";
      ctx.beginPath();
      f.forEach((v, i) => (i ? ctx.lineTo(...pos.get(v)) : ctx.moveTo(...pos.get(v))));
      ctx.closePath();
      ctx.fill();
    }
    ctx.strokeStyle = ball ? "#d2691e" : "#bbb";
    for (let i = 0; i < f.length; i++)
      for (let j = i + 1; j < f.length; j++) {
        ctx.beginPath();
        ctx.moveTo(...pos.get(f[i]));
        ctx.lineTo(...pos.get(f[j]));
        ctx.stroke();
      }
  }
  for (const [v, [x, y]] of pos) {
    ctx.fillStyle = inBall.has(v) ? "#d2691e" : "#999";
    ctx.beginPath();
    ctx.arc(x, y, 11, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = "#fff";
    ctx.font = "11px sans-serif";
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    ctx.fillText(v, x, y);
  }
}

function lineChart(canvas, xs, series, { logX = false } = {}) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, pad = 40;
  ctx.clearRect(0, 0, W, H);
  const tx = (x) => (logX ? Math.log10(x) : x);
  const [x0, x1] = [tx(xs[0]), tx(xs[xs.length - 1])];
  const ys = series.flatMap((s) => s.ys);
  const [y0, y1] = [Math.min(0, ...ys), Math.max(...ys) * 1.1 || 1];
  const px = (x) => pad + ((tx(x) - x0) / (x1 - x0 || 1)) * (W - 2 * pad);
  const py = (y) => H - pad - ((y - y0) / (y1 - y0)) * (H - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, W - 2 * pad, H - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText(y1.toFixed(3), 2, pad + 4);
  ctx.fillText(y0.toFixed(3), 2, H - pad);
  ctx.fillText(String(xs[0]), pad, H - pad + 14);
  ctx.fillText(String(xs[xs.length - 1]), W - pad - 20, H - pad + 14);
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dash ?? []);
    ctx.beginPath();
    s.ys.forEach((y, i) => (i ? ctx.lineTo(px(xs[i]), py(y)) : ctx.moveTo(px(xs[i]), py(y))));
    ctx.stroke();
  }
  ctx.setLineDash([]);
}

await init();
$("facets").value = example_facets();

$("explore").onclick = () =>
  show($("explore-out"), () => {
    const data = JSON.parse(explore($("facets").value, $("center").value, +$("k").value, +$("maxdim").value));
    drawComplex($("graph"), data);
    $("explore-out").textContent =
      `ball: ${data.members.join(" ")}\ncandidates: ${data.candidates.join(" ")}\nf-vector: (${data.f_vector.join(", ")})`;
  });

$("beta").onclick = () =>
  show($("beta-out"), () => {
    const d = JSON.parse(beta_curve(+$("bc-t").value, +$("bc-delta").value, +$("bc-seed").value));
    lineChart($("beta-plot"), d.betas, [
      { ys: d.estimates, color: "#1f77b4" },
      { ys: d.betas.map(() => d.truth), color: "#2ca02c", dash: [5, 4] },
    ], { logX: true });
    $("beta-out").textContent = `probe feature (${d.probe.join(", ")}), true probability ${d.truth.toFixed(4)}`;
  });

$("consistency").onclick = () =>
  show($("c-out"), () => {
    const d = JSON.parse(consistency($("c-grid").value, +$("c-reps").value, +$("c-seed").value));
    const ts = d.rows.map((r) => r.slices);
    lineChart($("c-plot"), ts, [{ ys: d.rows.map((r) => r.mean_abs_error), color: "#d62728" }]);
    $("c-out").textContent = d.rows.map((r) => `T=${r.slices}  β=${r.beta.toExponential(2)}  error=${r.mean_abs_error.toFixed(4)}`).join("\n");
  });

$("explore").click();
