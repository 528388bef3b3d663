/**
 * DOM rendering for the assessment flow.
 *
 * One scrollable page per session: task name and description on top, the
 * pooled documents as cards below, each with two mutually exclusive
 * judgment buttons. Only the documented card fields (authors, year, title,
 * abstract, keywords) are ever rendered; nothing in the payload reveals
 * which service returned a document.
 */

import { CardState, AssessmentFlow } from './state'

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag)
  if (className) node.className = className
  if (text !== undefined) node.textContent = text
  return node
}

function renderTopics(root: HTMLElement, flow: AssessmentFlow): void {
  const page = el('div', 'page topics-page')
  page.appendChild(el('h1', undefined, 'Relevance assessment'))
  page.appendChild(
    el('p', 'assessor-line', `Assessor: ${flow.assessorId} — choose a topic you are familiar with.`),
  )
  const list = el('ul', 'topic-list')
  for (const topic of flow.topics) {
    const item = el('li', 'topic-item')
    const button = el('button', 'topic-select')
    button.dataset.topicId = String(topic.id)
    button.appendChild(el('span', 'topic-title', topic.title))
    button.appendChild(el('span', 'topic-description', topic.description))
    button.appendChild(
      el('span', 'topic-sessions', `${topic.sessions} assessor(s) so far`),
    )
    button.addEventListener('click', () => {
      void flow.selectTopic(topic.id)
    })
    item.appendChild(button)
    list.appendChild(item)
  }
  page.appendChild(list)
  root.appendChild(page)
}

function renderCard(flow: AssessmentFlow, card: CardState): HTMLElement {
  const doc = card.doc
  const node = el('article', 'doc-card')
  node.dataset.docId = doc.doc_id

  const meta = el('div', 'doc-meta')
  meta.appendChild(el('span', 'doc-authors', doc.authors.join('; ') || 'Unknown authors'))
  meta.appendChild(el('span', 'doc-year', doc.year ? String(doc.year) : ''))
  node.appendChild(meta)
  node.appendChild(el('h3', 'doc-title', doc.title))
  node.appendChild(el('p', 'doc-abstract', doc.abstract))
  if (doc.keywords.length) {
    node.appendChild(el('p', 'doc-keywords', `Keywords: ${doc.keywords.join(', ')}`))
  }

  const buttons = el('div', 'judgment-buttons')
  const relevantBtn = el('button', 'judge judge-relevant', 'Relevant')
  const notRelevantBtn = el('button', 'judge judge-not-relevant', 'Not relevant')
  if (card.judgment === 'relevant') relevantBtn.classList.add('selected')
  if (card.judgment === 'not_relevant') notRelevantBtn.classList.add('selected')
  relevantBtn.addEventListener('click', () => {
    void flow.judge(doc.doc_id, true)
  })
  notRelevantBtn.addEventListener('click', () => {
    void flow.judge(doc.doc_id, false)
  })
  buttons.appendChild(relevantBtn)
  buttons.appendChild(notRelevantBtn)
  if (card.pending) {
    buttons.appendChild(el('span', 'pending-indicator', 'saving…'))
  }
  node.appendChild(buttons)
  return node
}

function renderAssessment(root: HTMLElement, flow: AssessmentFlow): void {
  const page = el('div', 'page assessment-page')

  const header = el('header', 'task-header')
  header.appendChild(el('h1', 'task-title', flow.topic ? flow.topic.title : ''))
  header.appendChild(el('p', 'task-description', flow.topic ? flow.topic.description : ''))
  page.appendChild(header)

  const progress = el('div', 'progress')
  const bar = el('div', 'progress-bar')
  const fill = el('div', 'progress-fill')
  fill.style.width = flow.total ? `${(100 * flow.judgedCount) / flow.total}%` : '0%'
  bar.appendChild(fill)
  progress.appendChild(bar)
  progress.appendChild(
    el('span', 'progress-label', `${flow.judgedCount} / ${flow.total} judged`),
  )
  page.appendChild(progress)

  if (flow.offline) {
    const banner = el('div', 'retry-banner')
    banner.appendChild(
      el('span', undefined, `${flow.pendingCount} judgment(s) not saved yet.`),
    )
    const retry = el('button', 'retry-button', 'Retry')
    retry.addEventListener('click', () => {
      void flow.retryQueued()
    })
    banner.appendChild(retry)
    page.appendChild(banner)
  }

  if (flow.complete) {
    const done = el('div', 'completion-screen')
    done.appendChild(el('h2', undefined, 'All documents judged — thank you!'))
    done.appendChild(
      el('p', undefined, 'You can still revise individual judgments below.'),
    )
    const back = el('button', 'back-to-topics', 'Choose another topic')
    back.addEventListener('click', () => {
      void flow.backToTopics()
    })
    done.appendChild(back)
    page.appendChild(done)
  }

  const cards = el('section', 'doc-list')
  for (const card of flow.cards) {
    cards.appendChild(renderCard(flow, card))
  }
  page.appendChild(cards)
  root.appendChild(page)
}

export function render(root: HTMLElement, flow: AssessmentFlow): void {
  root.textContent = ''
  if (flow.error) {
    root.appendChild(el('div', 'error-banner', flow.error))
  }
  if (flow.screen === 'topics') {
    renderTopics(root, flow)
  } else {
    renderAssessment(root, flow)
  }
}

/** Wire a flow to a root element: re-render on every state change. */
export function mount(root: HTMLElement, flow: AssessmentFlow): void {
  flow.subscribe(() => render(root, flow))
  render(root, flow)
}
