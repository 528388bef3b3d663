import { ApiClient } from './api'
import { mount } from './app'
import { AssessmentFlow } from './state'
import { browserStore } from './storage'

const ASSESSOR_KEY = 'irbench.assessor'

function askAssessorId(root: HTMLElement, onReady: (assessorId: string) => void): void {
  const page = document.createElement('div')
  page.className = 'page login-page'
  const heading = document.createElement('h1')
  heading.textContent = 'Relevance assessment'
  const label = document.createElement('label')
  label.textContent = 'Your assessor name: '
  const input = document.createElement('input')
  input.type = 'text'
  input.id = 'assessor-input'
  const button = document.createElement('button')
  button.textContent = 'Start'
  button.id = 'assessor-start'
  button.addEventListener('click', () => {
    const value = input.value.trim()
    if (value) onReady(value)
  })
  label.appendChild(input)
  page.append(heading, label, button)
  root.textContent = ''
  root.appendChild(page)
}

export function boot(root: HTMLElement): void {
  const store = browserStore()
  const begin = (assessorId: string) => {
    store.set(ASSESSOR_KEY, assessorId)
    const flow = new AssessmentFlow(new ApiClient(''), store, assessorId)
    mount(root, flow)
    void flow.start()
  }
  const known = store.get(ASSESSOR_KEY)
  if (known) {
    begin(known)
  } else {
    askAssessorId(root, begin)
  }
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  boot(document.getElementById('app') as HTMLElement)
}
